#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tempora/loader.hpp"
#include "tempora/projector.hpp"

namespace tempora {

struct QueryOutcome {
    QueryRecord query;
    bool key = false;
    bool valid = true;
    Verdict m1 = Verdict::Unknown;
    Verdict m2 = Verdict::Unknown;
    std::optional<TimeInterval> interval;  // projection detail behind the M2 verdict
    ProjectionSource source = ProjectionSource::HazardOnly;
};

struct SetScore {
    std::string set;
    int n = 0;
    double pct_m1 = 0.0;
    double pct_m2 = 0.0;
};

struct EvalReport {
    std::vector<SetScore> sets;  // ordered by set name
    SetScore total;
    int invalid = 0;
    std::vector<QueryOutcome> rows;  // valid rows, input order
};

inline bool verdict_correct(Verdict v, bool key) {
    return key ? v == Verdict::True : v == Verdict::Unknown;
}

/// Relative improvement of M2 over M1 as a percentage of M1
/// (28% -> 56% reports as 100).
inline double relative_improvement(double m1_pct, double m2_pct) {
    return (m2_pct - m1_pct) / m1_pct * 100.0;
}

inline std::map<std::string, bool> parse_answers_csv(const std::string& text,
                                                     const std::string& source = "<answers>") {
    std::map<std::string, bool> out;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line == "id,truth" || line[0] == '#') continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError(source, line_no, "expected id,True|False");
        const std::string value = line.substr(comma + 1);
        if (value != "True" && value != "False")
            throw ParseError(source, line_no, "truth must be True or False, got '" + value + "'");
        out[line.substr(0, comma)] = value == "True";
    }
    return out;
}

/// Answers every query in both modes against the immutable world, scores
/// against the key, and aggregates per set plus a total. Queries with
/// unknown symbols or missing key entries count as invalid and are
/// excluded. Results do not depend on the thread count.
inline EvalReport run_eval(const World& world, const std::vector<QueryRecord>& queries,
                           const std::map<std::string, bool>& key, double default_alpha = 0.5,
                           int threads = 1) {
    std::vector<QueryOutcome> outcomes(queries.size());
    const auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            QueryOutcome& row = outcomes[i];
            row.query = queries[i];
            const auto k = key.find(queries[i].id);
            if (k == key.end()) {
                row.valid = false;
                continue;
            }
            row.key = k->second;
            const double alpha = queries[i].alpha.value_or(default_alpha);
            try {
                row.m1 = answer(world, queries[i].fluent, queries[i].time, Mode::M1, alpha);
                row.m2 = answer(world, queries[i].fluent, queries[i].time, Mode::M2, alpha);
                try {
                    const ProjectionResult pr =
                        temporally_project(world, queries[i].fluent, queries[i].time, alpha);
                    row.interval = pr.interval;
                    row.source = pr.source;
                } catch (const Error&) {
                    // verdicts stand; only the detail columns stay empty
                }
            } catch (const DataError&) {
                row.valid = false;
            }
        }
    };
    const int n_threads = std::max(1, threads);
    if (n_threads == 1 || queries.size() < 64) {
        work(0, queries.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (queries.size() + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            const std::size_t begin = std::min(queries.size(), t * chunk);
            const std::size_t end = std::min(queries.size(), begin + chunk);
            if (begin < end) pool.emplace_back(work, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    EvalReport report;
    std::map<std::string, std::array<int, 3>> counts;  // set -> {n, m1 correct, m2 correct}
    for (QueryOutcome& row : outcomes) {
        if (!row.valid) {
            ++report.invalid;
            continue;
        }
        auto& c = counts[row.query.set];
        ++c[0];
        if (verdict_correct(row.m1, row.key)) ++c[1];
        if (verdict_correct(row.m2, row.key)) ++c[2];
        report.rows.push_back(std::move(row));
    }
    int total_n = 0, total_m1 = 0, total_m2 = 0;
    for (const auto& [set, c] : counts) {
        SetScore s;
        s.set = set;
        s.n = c[0];
        s.pct_m1 = 100.0 * c[1] / c[0];
        s.pct_m2 = 100.0 * c[2] / c[0];
        report.sets.push_back(s);
        total_n += c[0];
        total_m1 += c[1];
        total_m2 += c[2];
    }
    report.total.set = "total";
    report.total.n = total_n;
    if (total_n > 0) {
        report.total.pct_m1 = 100.0 * total_m1 / total_n;
        report.total.pct_m2 = 100.0 * total_m2 / total_n;
    }
    return report;
}

namespace detail {
inline std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}
} // namespace detail

/// report.csv: one row per (set, mode) plus exactly one total pair; the
/// improvement column applies the relative convention on M2 rows.
inline std::string render_report_csv(const EvalReport& report) {
    std::string out = "query_set,mode,n,pct_correct,improvement\n";
    const auto rows = [&](const SetScore& s) {
        out += s.set + ",m1," + std::to_string(s.n) + "," + detail::pct(s.pct_m1) + ",-\n";
        out += s.set + ",m2," + std::to_string(s.n) + "," + detail::pct(s.pct_m2) + ",";
        if (s.pct_m1 > 0.0) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.1f", relative_improvement(s.pct_m1, s.pct_m2));
            out += buf;
        } else {
            out += "-";
        }
        out += "\n";
    };
    for (const SetScore& s : report.sets) rows(s);
    rows(report.total);
    return out;
}

/// verdicts.csv: the per-query log the report aggregates are recomputable
/// from; projection detail rides on the m2 rows.
inline std::string render_verdicts_csv(const EvalReport& report) {
    std::string out = "id,set,mode,verdict,key,correct,interval_start,interval_end,source\n";
    for (const QueryOutcome& row : report.rows) {
        const std::string key = row.key ? "True" : "False";
        out += row.query.id + "," + row.query.set + ",m1," + to_string(row.m1) + "," + key + "," +
               (verdict_correct(row.m1, row.key) ? "1" : "0") + ",,,\n";
        out += row.query.id + "," + row.query.set + ",m2," + to_string(row.m2) + "," + key + "," +
               (verdict_correct(row.m2, row.key) ? "1" : "0") + ",";
        if (row.interval)
            out += row.interval->start.to_string() + "," + row.interval->end.to_string() + "," +
                   to_string(row.source);
        else
            out += ",,";
        out += "\n";
    }
    return out;
}

/// curves.csv: zero-covariate survival per spec and period, for plotting
/// persistence likelihood against elapsed periods.
inline std::string render_curves_csv(const HazardRegistry& registry,
                                     std::int64_t max_period = 60) {
    std::string out = "spec,period,survival\n";
    for (const HazardSpec& spec : registry.specs) {
        double s = 1.0;
        for (std::int64_t k = 1; k <= max_period; ++k) {
            s *= 1.0 - hazard_at(spec, k, std::vector<std::uint8_t>(spec.covariates.size(), 0));
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6f", s);
            out += spec.pattern.to_string() + "," + std::to_string(k) + "," + buf + "\n";
        }
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << text;
    if (!out) throw DataError("write failed for " + path);
}

} // namespace tempora
