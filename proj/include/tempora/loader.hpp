#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tempora/projector.hpp"
#include "tempora/sexpr.hpp"
#include "tempora/syntax.hpp"

namespace tempora {

struct QueryRecord {
    std::string id;
    std::string set = "all";
    Fluent fluent;
    TimeInterval time;
    Mode mode = Mode::M2;
    std::optional<double> alpha;  // absent -> run default
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline const std::string& head_of(const Sexpr& form, const std::string& source) {
    if (form.atom || form.items.empty() || !form.items[0].atom)
        throw ParseError(source, form.line, "expected a (head ...) form");
    return form.items[0].text;
}

inline void expect_arity(const Sexpr& form, std::size_t n, const std::string& source) {
    if (form.items.size() != n)
        throw ParseError(source, form.line,
                         form.items[0].text + " takes " + std::to_string(n - 1) + " arguments");
}

inline double parse_number(const Sexpr& s, const std::string& source) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s.text, &used);
        if (used != s.text.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ParseError(source, s.line, "expected a number, got '" + s.to_string() + "'");
    }
}

inline std::vector<double> parse_number_list(const Sexpr& s, const std::string& source) {
    if (s.atom) throw ParseError(source, s.line, "expected a list of numbers");
    std::vector<double> out;
    for (const Sexpr& item : s.items) out.push_back(parse_number(item, source));
    return out;
}

} // namespace detail

/// KB file: one statement per line, `;` comments. Forms: genls, genlPreds,
/// disjointWith, followingStageTypes, marker, predicate, assert.
inline void load_kb_text(World& world, const std::string& text,
                         const std::string& source = "<kb>") {
    for (const Sexpr& form : parse_sexprs(text, source)) {
        const std::string& head = detail::head_of(form, source);
        if (head == "genls") {
            detail::expect_arity(form, 3, source);
            world.kb.add_genls(detail::symbol_of(form.items[1]), detail::symbol_of(form.items[2]));
        } else if (head == "genlPreds") {
            detail::expect_arity(form, 3, source);
            world.kb.add_genl_preds(detail::symbol_of(form.items[1]),
                                    detail::symbol_of(form.items[2]));
        } else if (head == "disjointWith") {
            detail::expect_arity(form, 3, source);
            world.kb.add_disjoint(detail::symbol_of(form.items[1]),
                                  detail::symbol_of(form.items[2]));
        } else if (head == "followingStageTypes") {
            detail::expect_arity(form, 3, source);
            world.kb.add_following_stage(detail::symbol_of(form.items[1]),
                                         detail::symbol_of(form.items[2]));
        } else if (head == "marker") {
            detail::expect_arity(form, 3, source);
            world.kb.set_marker(detail::symbol_of(form.items[1]),
                                parse_marker(form.items[2].to_string()));
        } else if (head == "predicate") {
            if (form.items.size() != 3 && form.items.size() != 4)
                throw ParseError(source, form.line,
                                 "predicate takes a name, an arity, and optionally time-dependent");
            int arity = static_cast<int>(detail::parse_number(form.items[2], source));
            bool td = form.items.size() == 4;
            if (td && form.items[3].to_string() != "time-dependent")
                throw ParseError(source, form.line, "expected time-dependent");
            world.kb.declare_predicate(detail::symbol_of(form.items[1]), arity, td);
        } else if (head == "assert") {
            const KeywordArgs kw = split_keywords(form, 1, source);
            if (kw.positional.size() != 1)
                throw ParseError(source, form.line, "assert takes one fluent");
            const std::string mt =
                kw.find(":mt") ? detail::symbol_of(*kw.find(":mt")) : std::string("BaseMt");
            const TimeInterval time =
                parse_time_form(kw.require(":time", "assert", source, form.line), source);
            world.kb.add_assertion(Fluent::parse(*kw.positional[0], source), mt, time);
        } else {
            throw ParseError(source, form.line, "unknown kb statement '" + head + "'");
        }
    }
}

/// Event file: event, risk-rule, initiates-rule, terminates-rule, and the
/// instance-level initiates/terminates forms.
inline void load_events_text(World& world, const std::string& text,
                             const std::string& source = "<events>") {
    for (const Sexpr& form : parse_sexprs(text, source)) {
        const std::string& head = detail::head_of(form, source);
        if (head == "event") {
            const KeywordArgs kw = split_keywords(form, 1, source);
            Event e;
            e.id = detail::symbol_of(kw.require(":id", "event", source, form.line));
            e.type = detail::symbol_of(kw.require(":type", "event", source, form.line));
            world.kb.declare_collection(e.type);
            const Sexpr& time = kw.require(":time", "event", source, form.line);
            if (!time.atom) throw ParseError(source, time.line, "event time must be a date");
            e.time = TimePoint::parse(time.text);
            if (const Sexpr* roles = kw.find(":roles")) {
                if (roles->atom) throw ParseError(source, roles->line, "roles must be a list");
                for (const Sexpr& pair : roles->items) {
                    if (pair.atom || pair.items.size() != 2)
                        throw ParseError(source, pair.line, "each role is (role entity)");
                    e.roles[detail::symbol_of(pair.items[0])] = detail::symbol_of(pair.items[1]);
                }
            }
            world.events.add_event(std::move(e));
        } else if (head == "risk-rule") {
            detail::expect_arity(form, 4, source);
            world.kb.declare_collection(detail::symbol_of(form.items[1]));
            world.kb.declare_collection(detail::symbol_of(form.items[3]));
            world.events.add_risk_rule(RiskPeriodRule{detail::symbol_of(form.items[1]),
                                                      detail::symbol_of(form.items[2]),
                                                      detail::symbol_of(form.items[3])});
        } else if (head == "initiates-rule" || head == "terminates-rule") {
            detail::expect_arity(form, 4, source);
            world.kb.declare_collection(detail::symbol_of(form.items[1]));
            world.kb.declare_collection(detail::symbol_of(form.items[3]));
            world.events.add_type_rule(TypeEffectRule{
                head == "initiates-rule" ? EffectKind::Initiates : EffectKind::Terminates,
                detail::symbol_of(form.items[1]), detail::symbol_of(form.items[2]),
                detail::symbol_of(form.items[3])});
        } else if (head == "initiates" || head == "terminates") {
            detail::expect_arity(form, 3, source);
            const Fluent f = Fluent::parse(form.items[2], source);
            if (f.kind == FluentKind::Isa) world.kb.declare_collection(f.collection);
            world.events.add_instance_effect(InstanceEffect{
                head == "initiates" ? EffectKind::Initiates : EffectKind::Terminates,
                detail::symbol_of(form.items[1]), f});
        } else {
            throw ParseError(source, form.line, "unknown event statement '" + head + "'");
        }
    }
}

/// Hazard file: (hazard :for <pattern> :period <days> :h (...)|:alpha (...)
/// [:cov ((<pattern> <beta>) ...)]) and (persists-for <fluent> <date> <days>).
inline void load_hazards_text(World& world, const std::string& text,
                              const std::string& source = "<hazards>") {
    for (const Sexpr& form : parse_sexprs(text, source)) {
        const std::string& head = detail::head_of(form, source);
        if (head == "hazard") {
            const KeywordArgs kw = split_keywords(form, 1, source);
            HazardSpec spec;
            spec.pattern =
                FluentPattern::parse(kw.require(":for", "hazard", source, form.line), source);
            if (const Sexpr* period = kw.find(":period"))
                spec.period_days = parse_duration_days(period->text);
            const Sexpr* table = kw.find(":h");
            const Sexpr* alphas = kw.find(":alpha");
            if ((table == nullptr) == (alphas == nullptr))
                throw ParseError(source, form.line, "hazard needs exactly one of :h or :alpha");
            spec.baseline = table ? BaselineKind::Table : BaselineKind::Logistic;
            spec.values = detail::parse_number_list(table ? *table : *alphas, source);
            if (const Sexpr* cov = kw.find(":cov")) {
                if (cov->atom) throw ParseError(source, cov->line, ":cov must be a list");
                for (const Sexpr& entry : cov->items) {
                    if (entry.atom || entry.items.size() != 2)
                        throw ParseError(source, entry.line, "each covariate is (pattern beta)");
                    spec.covariates.push_back(
                        Covariate{FluentPattern::parse(entry.items[0], source),
                                  detail::parse_number(entry.items[1], source)});
                }
            }
            if (spec.pattern.kind == PatternKind::Collection)
                world.kb.declare_collection(spec.pattern.collection);
            world.hazards.add(std::move(spec));
        } else if (head == "persists-for") {
            detail::expect_arity(form, 4, source);
            const Fluent f = Fluent::parse(form.items[1], source);
            if (f.kind == FluentKind::Isa) world.kb.declare_collection(f.collection);
            world.hazards.add_fixed(FixedDurationRule{
                f, TimePoint::parse(form.items[2].text),
                static_cast<std::int64_t>(detail::parse_number(form.items[3], source))});
        } else {
            throw ParseError(source, form.line, "unknown hazard statement '" + head + "'");
        }
    }
}

namespace detail {
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}
} // namespace detail

/// Hazard-file rendering of a spec; parses back to an equivalent spec.
inline std::string to_file_form(const HazardSpec& spec) {
    std::string out = "(hazard :for " + spec.pattern.to_string() + " :period " +
                      std::to_string(spec.period_days);
    out += spec.baseline == BaselineKind::Table ? " :h (" : " :alpha (";
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        if (i) out += ' ';
        out += detail::format_number(spec.values[i]);
    }
    out += ')';
    if (!spec.covariates.empty()) {
        out += " :cov (";
        for (std::size_t i = 0; i < spec.covariates.size(); ++i) {
            if (i) out += ' ';
            out += '(' + spec.covariates[i].pattern.to_string() + ' ' +
                   detail::format_number(spec.covariates[i].beta) + ')';
        }
        out += ')';
    }
    return out + ")";
}

inline std::string to_file_form(const FixedDurationRule& rule) {
    return "(persists-for " + rule.fluent.to_string() + " " + rule.start.to_string() + " " +
           std::to_string(rule.duration_days) + ")";
}

/// Query file: (query [:id q1] [:set s1] [:mode m1|m2] [:alpha 0.5]
/// :time <time-form> <fluent>).
inline std::vector<QueryRecord> parse_queries_text(const std::string& text,
                                                   const std::string& source = "<queries>") {
    std::vector<QueryRecord> out;
    for (const Sexpr& form : parse_sexprs(text, source)) {
        if (detail::head_of(form, source) != "query")
            throw ParseError(source, form.line, "expected (query ...)");
        const KeywordArgs kw = split_keywords(form, 1, source);
        if (kw.positional.size() != 1)
            throw ParseError(source, form.line, "query takes one fluent");
        QueryRecord q;
        q.id = kw.find(":id") ? detail::symbol_of(*kw.find(":id"))
                              : "q" + std::to_string(out.size() + 1);
        if (const Sexpr* set = kw.find(":set")) q.set = detail::symbol_of(*set);
        if (const Sexpr* mode = kw.find(":mode")) q.mode = parse_mode(mode->text);
        if (const Sexpr* alpha = kw.find(":alpha")) q.alpha = detail::parse_number(*alpha, source);
        q.time = parse_time_form(kw.require(":time", "query", source, form.line), source);
        q.fluent = Fluent::parse(*kw.positional[0], source);
        out.push_back(std::move(q));
    }
    return out;
}

inline void load_kb_file(World& world, const std::string& path) {
    load_kb_text(world, detail::read_file(path), path);
}
inline void load_events_file(World& world, const std::string& path) {
    load_events_text(world, detail::read_file(path), path);
}
inline void load_hazards_file(World& world, const std::string& path) {
    load_hazards_text(world, detail::read_file(path), path);
}
inline std::vector<QueryRecord> parse_queries_file(const std::string& path) {
    return parse_queries_text(detail::read_file(path), path);
}

} // namespace tempora
