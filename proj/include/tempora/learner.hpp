#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "tempora/hazard.hpp"
#include "tempora/time.hpp"

namespace tempora {

/// One individual's observed spell at risk: when the risk period opened, how
/// long observation lasted, when (if ever) the terminating event occurred,
/// and which covariates were active when.
struct Episode {
    std::string individual;
    TimePoint risk_start;
    TimePoint observed_until;
    std::optional<TimePoint> event_time;  // absent = censored
    std::vector<std::pair<int, TimeInterval>> covariate_intervals;

    void validate() const {
        if (!(risk_start < observed_until))
            throw DataError("episode for " + individual + " has no observation span");
        if (event_time) {
            if (*event_time <= risk_start)
                throw DataError("event before risk start for " + individual);
            if (*event_time > observed_until)
                throw DataError("event after observation end for " + individual);
        }
        for (const auto& [idx, span] : covariate_intervals) {
            (void)span;
            if (idx < 0) throw DataError("negative covariate index for " + individual);
        }
    }
};

/// One (individual, period) row: covariate indicators plus the event flag.
/// Event rows are final; censored episodes contribute only their fully
/// observed periods.
struct PersonPeriodRecord {
    std::string individual;
    std::int64_t period = 1;
    std::vector<std::uint8_t> x;
    std::uint8_t event = 0;
};

inline std::size_t covariate_count(const std::vector<Episode>& episodes) {
    int max_idx = -1;
    for (const Episode& e : episodes)
        for (const auto& [idx, span] : e.covariate_intervals) {
            (void)span;
            max_idx = std::max(max_idx, idx);
        }
    return static_cast<std::size_t>(max_idx + 1);
}

/// Expands episodes into person-period records with periods of
/// `period_days`. A covariate is on in period j iff its span overlaps the
/// period span.
inline std::vector<PersonPeriodRecord> build_person_period(const std::vector<Episode>& episodes,
                                                           std::int64_t period_days) {
    const std::size_t n_cov = covariate_count(episodes);
    std::vector<PersonPeriodRecord> out;
    for (const Episode& e : episodes) {
        e.validate();
        const PeriodScheme scheme{e.risk_start, period_days};
        const std::int64_t last = e.event_time
                                      ? scheme.period_index(*e.event_time)
                                      : (e.observed_until - e.risk_start) / period_days;
        for (std::int64_t j = 1; j <= last; ++j) {
            PersonPeriodRecord r;
            r.individual = e.individual;
            r.period = j;
            r.event = (e.event_time && j == last) ? 1 : 0;
            r.x.assign(n_cov, 0);
            const TimeInterval span = scheme.period_span(j);
            for (const auto& [idx, cov_span] : e.covariate_intervals)
                if (intersect(cov_span, span)) r.x[idx] = 1;
            out.push_back(std::move(r));
        }
    }
    return out;
}

namespace detail {
inline double alpha_for_period(const std::vector<double>& alpha, std::int64_t period) {
    const std::size_t idx = static_cast<std::size_t>(period) <= alpha.size()
                                ? static_cast<std::size_t>(period) - 1
                                : alpha.size() - 1;
    return alpha[idx];
}
inline double clamp_prob(double h) { return std::min(1.0 - 1e-12, std::max(1e-12, h)); }
} // namespace detail

/// Discrete-time survival log-likelihood: each record contributes
/// event*ln(h) + (1-event)*ln(1-h), with h from the logistic law. Hazards
/// clamp at 1e-12 from both ends so mismatched certain events stay finite.
inline double log_likelihood(const std::vector<double>& alpha, const std::vector<double>& beta,
                             const std::vector<PersonPeriodRecord>& records) {
    if (alpha.empty()) throw DataError("log_likelihood needs at least one intercept");
    double ll = 0.0;
    for (const PersonPeriodRecord& r : records) {
        if (r.x.size() != beta.size())
            throw DataError("record covariate length does not match beta length");
        double bx = 0.0;
        for (std::size_t i = 0; i < beta.size(); ++i)
            if (r.x[i]) bx += beta[i];
        const double h =
            detail::clamp_prob(logistic_hazard(detail::alpha_for_period(alpha, r.period), bx));
        ll += r.event ? std::log(h) : std::log(1.0 - h);
    }
    return ll;
}

/// Analytic gradient of log_likelihood: residual (event - h) per record,
/// accumulated into the period's intercept and each active covariate.
inline std::pair<std::vector<double>, std::vector<double>> log_likelihood_gradient(
    const std::vector<double>& alpha, const std::vector<double>& beta,
    const std::vector<PersonPeriodRecord>& records) {
    std::vector<double> ga(alpha.size(), 0.0), gb(beta.size(), 0.0);
    for (const PersonPeriodRecord& r : records) {
        double bx = 0.0;
        for (std::size_t i = 0; i < beta.size(); ++i)
            if (r.x[i]) bx += beta[i];
        const double h = logistic_hazard(detail::alpha_for_period(alpha, r.period), bx);
        const double resid = static_cast<double>(r.event) - h;
        const std::size_t idx = static_cast<std::size_t>(r.period) <= alpha.size()
                                    ? static_cast<std::size_t>(r.period) - 1
                                    : alpha.size() - 1;
        ga[idx] += resid;
        for (std::size_t i = 0; i < beta.size(); ++i)
            if (r.x[i]) gb[i] += resid;
    }
    return {std::move(ga), std::move(gb)};
}

struct FitConfig {
    std::int64_t max_iterations = 500;
    double grad_tol = 1e-6;
    bool pool_sparse = true;        // merge event-free periods with a neighbor
    double separation_cap = 20.0;   // |coefficient| ceiling; hitting it flags separation
};

struct FitResult {
    std::vector<double> alpha;  // one intercept per modeled period (pooled groups expanded)
    std::vector<double> beta;
    double log_likelihood = 0.0;
    bool converged = false;
    std::int64_t iterations = 0;
    bool separation = false;
    std::vector<std::int64_t> at_risk;  // per modeled period
    std::vector<std::int64_t> events;
};

/// Maximum-likelihood fit of per-period intercepts and covariate
/// coefficients by full-batch gradient ascent with a backtracking line
/// search. Periods beyond `n_periods` pool into the last one; event-free
/// periods pool with their neighbor when pool_sparse is set.
inline FitResult fit(const std::vector<PersonPeriodRecord>& records, std::int64_t n_periods,
                     const FitConfig& config = {}) {
    if (n_periods < 1) throw DataError("fit needs at least one modeled period");
    if (records.empty()) throw DataError("fit needs at least one record");
    const std::size_t n_cov = records.front().x.size();

    FitResult result;
    result.at_risk.assign(n_periods, 0);
    result.events.assign(n_periods, 0);
    std::int64_t total_events = 0;
    for (const PersonPeriodRecord& r : records) {
        const std::int64_t j = std::min<std::int64_t>(r.period, n_periods);
        ++result.at_risk[j - 1];
        if (r.event) {
            ++result.events[j - 1];
            ++total_events;
        }
    }

    // Pooling: a group accumulates periods until it holds an event; a
    // trailing event-free group merges backward.
    std::vector<std::size_t> group_of(n_periods);
    std::size_t n_groups = 1;
    if (config.pool_sparse) {
        std::size_t g = 0;
        bool group_has_event = false;
        for (std::int64_t j = 1; j <= n_periods; ++j) {
            if (group_has_event) {
                ++g;
                group_has_event = false;
            }
            group_of[j - 1] = g;
            if (result.events[j - 1] > 0) group_has_event = true;
        }
        if (!group_has_event && g > 0) {
            for (auto& gi : group_of)
                if (gi == g) gi = g - 1;
            --g;
        }
        n_groups = g + 1;
    } else {
        for (std::int64_t j = 1; j <= n_periods; ++j) group_of[j - 1] = j - 1;
        n_groups = static_cast<std::size_t>(n_periods);
    }

    // Parameters: group intercepts then covariate coefficients.
    const double rate = detail::clamp_prob(static_cast<double>(total_events) /
                                           static_cast<double>(records.size()));
    std::vector<double> theta(n_groups + n_cov, 0.0);
    for (std::size_t g = 0; g < n_groups; ++g)
        theta[g] = std::clamp(logit(rate), -config.separation_cap, config.separation_cap);

    const auto group_for_record = [&](std::int64_t period) {
        return group_of[std::min<std::int64_t>(period, n_periods) - 1];
    };
    const auto eval = [&](const std::vector<double>& th, std::vector<double>* grad) {
        if (grad) grad->assign(th.size(), 0.0);
        double ll = 0.0;
        for (const PersonPeriodRecord& r : records) {
            double bx = 0.0;
            for (std::size_t i = 0; i < n_cov; ++i)
                if (r.x[i]) bx += th[n_groups + i];
            const std::size_t g = group_for_record(r.period);
            const double h = logistic_hazard(th[g], bx);
            const double hc = detail::clamp_prob(h);
            ll += r.event ? std::log(hc) : std::log(1.0 - hc);
            if (grad) {
                const double resid = static_cast<double>(r.event) - h;
                (*grad)[g] += resid;
                for (std::size_t i = 0; i < n_cov; ++i)
                    if (r.x[i]) (*grad)[n_groups + i] += resid;
            }
        }
        return ll;
    };

    // Curvature bound: each record contributes at most 0.25 to the diagonal
    // of minus the Hessian per active coordinate. Steps at or below t_safe
    // ascend monotonically in exact arithmetic, so below the floor the line
    // search stops consulting likelihood differences, which drown in
    // round-off near the optimum.
    std::int64_t max_count = 1;
    {
        std::vector<std::int64_t> coord_count(n_groups + n_cov, 0);
        for (const PersonPeriodRecord& r : records) {
            ++coord_count[group_for_record(r.period)];
            for (std::size_t i = 0; i < n_cov; ++i)
                if (r.x[i]) ++coord_count[n_groups + i];
        }
        for (std::int64_t c : coord_count) max_count = std::max(max_count, c);
    }
    const double t_safe =
        1.0 / (0.25 * (1.0 + static_cast<double>(n_cov)) * static_cast<double>(max_count) + 1.0);

    std::vector<double> grad;
    double ll = eval(theta, &grad);
    double step = 1.0;
    int stalled = 0;
    bool made_progress = true;
    for (result.iterations = 0; result.iterations < config.max_iterations; ++result.iterations) {
        double gmax = 0.0, gnorm2 = 0.0;
        for (double g : grad) {
            gmax = std::max(gmax, std::abs(g));
            gnorm2 += g * g;
        }
        if (gmax < config.grad_tol) {
            result.converged = true;
            break;
        }
        // grow the step only after representable progress; once improvements
        // drop below the likelihood's resolution the sufficient-decrease test
        // is vacuous, and the step must hold at its last working value
        if (made_progress) step = std::min(step * 4.0, 1.0);
        std::vector<double> candidate(theta.size());
        double candidate_ll = -std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int halvings = 0; halvings < 80; ++halvings) {
            for (std::size_t i = 0; i < theta.size(); ++i)
                candidate[i] = theta[i] + step * grad[i];
            candidate_ll = eval(candidate, nullptr);
            if (step <= t_safe || candidate_ll >= ll + 1e-4 * step * gnorm2) {
                accepted = true;
                break;
            }
            step = std::max(step * 0.5, t_safe);
        }
        made_progress = candidate_ll > ll;
        if (!accepted) break;  // no representable improvement left
        stalled = candidate == theta ? stalled + 1 : 0;  // the likelihood may go flat in
        theta = candidate;                               // double while theta still contracts
        for (double& t : theta) {
            if (std::abs(t) > config.separation_cap) {
                t = std::clamp(t, -config.separation_cap, config.separation_cap);
                result.separation = true;
            }
        }
        ll = eval(theta, &grad);
        if (stalled >= 2) break;  // parameters pinned at machine precision
    }

    for (double t : theta)
        if (std::abs(t) >= config.separation_cap) result.separation = true;
    result.alpha.resize(n_periods);
    for (std::int64_t j = 1; j <= n_periods; ++j) result.alpha[j - 1] = theta[group_of[j - 1]];
    result.beta.assign(theta.begin() + n_groups, theta.end());
    result.log_likelihood = ll;
    return result;
}

/// Packs a fit into a hazard spec consumable by the projection engine.
/// Refuses unconverged fits unless forced. Covariate patterns must line up
/// with the fitted coefficients.
inline HazardSpec export_spec(const FitResult& fit_result, const FluentPattern& pattern,
                              std::int64_t period_days,
                              const std::vector<FluentPattern>& covariate_patterns = {},
                              bool force = false) {
    if (!fit_result.converged && !force)
        throw DataError("fit did not converge; pass force to export anyway");
    if (covariate_patterns.size() != fit_result.beta.size())
        throw DataError("need one covariate pattern per fitted coefficient");
    HazardSpec spec;
    spec.pattern = pattern;
    spec.period_days = period_days;
    spec.baseline = BaselineKind::Logistic;
    spec.values = fit_result.alpha;
    for (std::size_t i = 0; i < covariate_patterns.size(); ++i)
        spec.covariates.push_back(Covariate{covariate_patterns[i], fit_result.beta[i]});
    spec.validate();
    return spec;
}

/// Episode rows: individual,risk_start,observed_until,event_time (empty =
/// censored), then any number of covariate tokens idx:start..end.
/// '#' starts a comment line.
inline std::vector<Episode> parse_episodes_text(const std::string& text,
                                                const std::string& source = "<episodes>") {
    std::vector<Episode> out;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        std::vector<std::string> fields;
        std::size_t f = 0;
        while (true) {
            const std::size_t comma = line.find(',', f);
            fields.push_back(line.substr(f, comma == std::string::npos ? comma : comma - f));
            if (comma == std::string::npos) break;
            f = comma + 1;
        }
        if (fields.size() < 4)
            throw ParseError(source, line_no,
                             "expected individual,risk_start,observed_until,event_time");
        Episode e;
        e.individual = fields[0];
        e.risk_start = TimePoint::parse(fields[1]);
        e.observed_until = TimePoint::parse(fields[2]);
        if (!fields[3].empty()) e.event_time = TimePoint::parse(fields[3]);
        for (std::size_t i = 4; i < fields.size(); ++i) {
            if (fields[i].empty()) continue;
            const std::size_t colon = fields[i].find(':');
            const std::size_t dots = fields[i].find("..");
            if (colon == std::string::npos || dots == std::string::npos || dots < colon)
                throw ParseError(source, line_no,
                                 "covariate token must be idx:start..end, got '" + fields[i] + "'");
            int idx = 0;
            try {
                idx = std::stoi(fields[i].substr(0, colon));
            } catch (...) {
                throw ParseError(source, line_no, "bad covariate index in '" + fields[i] + "'");
            }
            const TimePoint s = TimePoint::parse(fields[i].substr(colon + 1, dots - colon - 1));
            const TimePoint t = TimePoint::parse(fields[i].substr(dots + 2));
            e.covariate_intervals.emplace_back(idx, TimeInterval{s, t});
        }
        e.validate();
        out.push_back(std::move(e));
    }
    return out;
}

/// Human-readable fit summary: one row per modeled period.
inline std::string format_fit_report(const FitResult& r) {
    char buf[160];
    std::string out;
    std::snprintf(buf, sizeof buf, "log_likelihood %.6f converged %s iterations %lld%s\n",
                  r.log_likelihood, r.converged ? "yes" : "no",
                  static_cast<long long>(r.iterations),
                  r.separation ? " (separation: coefficient capped)" : "");
    out += buf;
    out += "period  alpha        hazard      at_risk  events\n";
    for (std::size_t j = 0; j < r.alpha.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%-7zu %-12.6f %-11.6f %-8lld %lld\n", j + 1, r.alpha[j],
                      logistic_hazard(r.alpha[j], 0.0), static_cast<long long>(r.at_risk[j]),
                      static_cast<long long>(r.events[j]));
        out += buf;
    }
    for (std::size_t i = 0; i < r.beta.size(); ++i) {
        std::snprintf(buf, sizeof buf, "beta[%zu] %.6f\n", i, r.beta[i]);
        out += buf;
    }
    return out;
}

} // namespace tempora
