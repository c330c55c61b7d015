#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tempora/kb.hpp"
#include "tempora/syntax.hpp"
#include "tempora/time.hpp"

namespace tempora {

inline constexpr std::int64_t kDefaultHorizonPeriods = 200;

enum class BaselineKind {
    Table,     ///< per-period hazards h_j in [0,1]
    Logistic,  ///< per-period intercepts; h_j = 1/(1+e^-alpha_j)
};

struct Covariate {
    FluentPattern pattern;
    double beta = 0.0;
};

/// A per-period baseline hazard attached to a fluent pattern, plus covariate
/// coefficients that rescale it. The last baseline value extends to all
/// later periods.
struct HazardSpec {
    FluentPattern pattern;
    std::int64_t period_days = 365;
    BaselineKind baseline = BaselineKind::Table;
    std::vector<double> values;  // h_j table or logistic intercepts
    std::vector<Covariate> covariates;

    void validate() const {
        if (period_days < 1) throw DataError("hazard period must be at least one day");
        if (values.empty()) throw DataError("hazard spec has no baseline values");
        if (baseline == BaselineKind::Table)
            for (double h : values)
                if (!(h >= 0.0 && h <= 1.0))
                    throw DataError("table hazard outside [0,1]: " + std::to_string(h));
        for (std::size_t i = 0; i < covariates.size(); ++i)
            for (std::size_t j = i + 1; j < covariates.size(); ++j)
                if (covariates[i].pattern == covariates[j].pattern)
                    throw DataError("duplicate covariate pattern " +
                                    covariates[i].pattern.to_string());
    }

    double baseline_value(std::int64_t j) const {
        const std::size_t idx =
            static_cast<std::size_t>(j) <= values.size() ? static_cast<std::size_t>(j) - 1
                                                         : values.size() - 1;
        return values[idx];
    }
};

/// Per-period covariate indicators for one individual, in spec order.
/// Periods beyond the stored range read as all-zero; the empty trajectory
/// reads as all-zero for any spec.
struct CovariateTrajectory {
    std::size_t n_covariates = 0;
    std::vector<std::vector<std::uint8_t>> periods;  // periods[j-1]

    static CovariateTrajectory none() { return {}; }

    std::vector<std::uint8_t> x(std::int64_t j) const { return x_for(j, n_covariates); }

    std::vector<std::uint8_t> x_for(std::int64_t j, std::size_t n) const {
        if (j >= 1 && static_cast<std::size_t>(j) <= periods.size()) {
            const auto& row = periods[j - 1];
            if (row.size() != n)
                throw DataError("trajectory carries " + std::to_string(row.size()) +
                                " indicators, spec expects " + std::to_string(n));
            return row;
        }
        return std::vector<std::uint8_t>(n, 0);
    }
};

inline double logistic_hazard(double alpha, double beta_dot_x) {
    return 1.0 / (1.0 + std::exp(-alpha) * std::exp(-beta_dot_x));
}

inline double logit(double h) { return std::log(h / (1.0 - h)); }

/// Discrete hazard for period j under covariate indicators x. A table
/// baseline with all-zero x returns h_j verbatim; otherwise the table value
/// converts to an intercept via logit and the logistic scaling law applies.
inline double hazard_at(const HazardSpec& spec, std::int64_t j,
                        std::span<const std::uint8_t> x) {
    if (j < 1) throw DataError("hazard period index must be positive");
    if (x.size() != spec.covariates.size())
        throw DataError("covariate indicator vector has length " + std::to_string(x.size()) +
                        ", spec expects " + std::to_string(spec.covariates.size()));
    double beta_dot_x = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i]) beta_dot_x += spec.covariates[i].beta;
    const double base = spec.baseline_value(j);
    if (spec.baseline == BaselineKind::Table) {
        if (beta_dot_x == 0.0) return base;
        return logistic_hazard(logit(base), beta_dot_x);
    }
    return logistic_hazard(base, beta_dot_x);
}

/// Probability that the terminating event has not occurred through period k:
/// the product of (1 - h_j) for j = 1..k. k = 0 gives exactly 1.
inline double survival(const HazardSpec& spec, std::int64_t k, const CovariateTrajectory& traj) {
    if (k < 0) throw DataError("survival takes a non-negative period count");
    double s = 1.0;
    for (std::int64_t j = 1; j <= k; ++j)
        s *= 1.0 - hazard_at(spec, j, traj.x_for(j, spec.covariates.size()));
    return s;
}

/// Probability mass that the terminating event occurs exactly in period k.
inline double event_time_pmf(const HazardSpec& spec, std::int64_t k,
                             const CovariateTrajectory& traj) {
    if (k < 1) throw DataError("event period must be positive");
    return hazard_at(spec, k, traj.x_for(k, spec.covariates.size())) * survival(spec, k - 1, traj);
}

namespace detail {
/// Largest k with survival(k) > alpha, scanning up to `horizon` periods.
inline std::int64_t persistence_periods(const HazardSpec& spec, const CovariateTrajectory& traj,
                                        double alpha, std::int64_t horizon) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DataError("threshold must lie strictly between 0 and 1");
    double s = 1.0;
    for (std::int64_t k = 1; k <= horizon; ++k) {
        s *= 1.0 - hazard_at(spec, k, traj.x_for(k, spec.covariates.size()));
        if (!(s > alpha)) return k - 1;
    }
    throw UnboundedIntervalError("survival stays above " + std::to_string(alpha) + " beyond " +
                                 std::to_string(horizon) + " periods for " +
                                 spec.pattern.to_string());
}
} // namespace detail

/// Span the fluent stays likely (survival > alpha) extending forward from
/// `start`; degenerate [start, start] when even the first period fails.
inline TimeInterval forward_interval(const HazardSpec& spec, TimePoint start,
                                     const CovariateTrajectory& traj, double alpha,
                                     std::int64_t horizon = kDefaultHorizonPeriods) {
    const std::int64_t k = detail::persistence_periods(spec, traj, alpha, horizon);
    return TimeInterval{start, start.plus_days(k * spec.period_days)};
}

/// Mirror image of forward_interval, ending at `end`. Trajectory period j
/// counts backward: period 1 is the span immediately before `end`.
inline TimeInterval backward_interval(const HazardSpec& spec, TimePoint end,
                                      const CovariateTrajectory& traj, double alpha,
                                      std::int64_t horizon = kDefaultHorizonPeriods) {
    const std::int64_t k = detail::persistence_periods(spec, traj, alpha, horizon);
    return TimeInterval{end.plus_days(-k * spec.period_days), end};
}

/// Evaluates the spec's covariate patterns against the store for `subject`,
/// one indicator vector per period. A covariate is present in period j iff
/// one of its assertions overlaps the period span. Forward periods count
/// from `origin` onward; backward periods count from `origin` back.
inline CovariateTrajectory build_trajectory(const HazardSpec& spec, const KbStore& kb,
                                            const std::string& subject, TimePoint origin,
                                            bool backward = false,
                                            std::int64_t n_periods = kDefaultHorizonPeriods) {
    CovariateTrajectory traj;
    traj.n_covariates = spec.covariates.size();
    if (spec.covariates.empty()) return traj;

    std::vector<std::vector<TimeInterval>> spans(spec.covariates.size());
    for (std::size_t i = 0; i < spec.covariates.size(); ++i) {
        const FluentPattern& p = spec.covariates[i].pattern;
        if (p.kind != PatternKind::Collection)
            throw DataError("covariate patterns must be (isa ?x <collection>) forms, got " +
                            p.to_string());
        if (!kb.has_collection(p.collection)) continue;
        for (const Assertion* a : kb.assertions_entailing(Fluent::isa(subject, p.collection)))
            spans[i].push_back(a->time);
    }

    traj.periods.resize(n_periods, std::vector<std::uint8_t>(spec.covariates.size(), 0));
    const PeriodScheme scheme{origin, spec.period_days};
    for (std::int64_t j = 1; j <= n_periods; ++j) {
        TimeInterval span = scheme.period_span(j);
        if (backward)
            span = TimeInterval{origin.plus_days(-j * spec.period_days + 1),
                                origin.plus_days(-(j - 1) * spec.period_days)};
        for (std::size_t i = 0; i < spans.size(); ++i)
            for (const TimeInterval& s : spans[i])
                if (intersect(s, span)) {
                    traj.periods[j - 1][i] = 1;
                    break;
                }
    }
    return traj;
}

/// A default persistence term: the fluent holds from `start` for `duration`
/// days, e.g. an office held for a fixed term from its start date.
struct FixedDurationRule {
    Fluent fluent;
    TimePoint start;
    std::int64_t duration_days = 0;
};

struct HazardRegistry {
    std::vector<HazardSpec> specs;
    std::vector<FixedDurationRule> fixed_rules;

    void add(HazardSpec spec) {
        spec.validate();
        specs.push_back(std::move(spec));
    }
    void add_fixed(FixedDurationRule rule) {
        if (rule.duration_days <= 0) throw DataError("fixed duration must be positive");
        fixed_rules.push_back(std::move(rule));
    }
};

struct ResolvedHazard {
    const HazardSpec* spec = nullptr;
    std::string warning;  // non-empty when a specificity tie was broken
};

namespace detail {
inline const HazardSpec* pick_lexicographic(std::vector<const HazardSpec*>& candidates,
                                            std::string& warning) {
    const HazardSpec* best = candidates.front();
    for (const HazardSpec* s : candidates)
        if (s->pattern.to_string() < best->pattern.to_string()) best = s;
    if (candidates.size() > 1) {
        warning = "hazard resolution tie between";
        for (const HazardSpec* s : candidates) warning += " " + s->pattern.to_string();
        warning += "; chose " + best->pattern.to_string();
    }
    return best;
}
} // namespace detail

/// Picks the hazard spec governing a fluent. Relations try the typed
/// argument-position patterns first (most specific filler collection wins),
/// then the bare predicate. Collection fluents walk genls upward, nearest
/// level first. Ties at equal specificity break lexicographically, with a
/// warning recorded on the result.
inline std::optional<ResolvedHazard> resolve_hazard(const Fluent& f,
                                                    const HazardRegistry& registry,
                                                    const KbStore& kb) {
    ResolvedHazard out;
    if (f.kind == FluentKind::Rel) {
        // Filler collections, graded by genls distance from the stored types.
        std::vector<const HazardSpec*> best;
        std::size_t best_level = 0;
        for (const HazardSpec& spec : registry.specs) {
            if (spec.pattern.kind != PatternKind::RelArg || spec.pattern.predicate != f.predicate)
                continue;
            if (spec.pattern.arg_pos < 1 ||
                static_cast<std::size_t>(spec.pattern.arg_pos) > f.args.size())
                continue;
            const std::string& filler = f.args[spec.pattern.arg_pos - 1];
            std::optional<std::size_t> level;
            for (const Assertion* a : kb.isa_assertions_about(filler)) {
                const auto levels = kb.genls_levels(a->fluent.collection);
                for (std::size_t l = 0; l < levels.size(); ++l)
                    for (const std::string& c : levels[l])
                        if (c == spec.pattern.collection && (!level || l < *level)) level = l;
            }
            if (!level) continue;
            if (best.empty() || *level < best_level) {
                best = {&spec};
                best_level = *level;
            } else if (*level == best_level) {
                best.push_back(&spec);
            }
        }
        if (!best.empty()) {
            out.spec = detail::pick_lexicographic(best, out.warning);
            return out;
        }
        for (const HazardSpec& spec : registry.specs)
            if (spec.pattern.kind == PatternKind::Predicate &&
                spec.pattern.predicate == f.predicate) {
                out.spec = &spec;
                return out;
            }
        return std::nullopt;
    }

    if (!kb.has_collection(f.collection)) return std::nullopt;
    for (const auto& level : kb.genls_levels(f.collection)) {
        std::vector<const HazardSpec*> matches;
        for (const std::string& c : level)
            for (const HazardSpec& spec : registry.specs)
                if (spec.pattern.kind == PatternKind::Collection && spec.pattern.collection == c)
                    matches.push_back(&spec);
        if (!matches.empty()) {
            out.spec = detail::pick_lexicographic(matches, out.warning);
            return out;
        }
    }
    return std::nullopt;
}

/// Projection interval implied by a temporal-semantic marker on the fluent's
/// collection, given the span over which the fluent is known true. Needs the
/// subject's existence bounds; absent when they are unknown or no marker
/// applies.
inline std::optional<TimeInterval> marker_interval(const Fluent& f, const TimeInterval& known_at,
                                                   const KbStore& kb) {
    if (f.kind != FluentKind::Isa) return std::nullopt;
    const std::set<Marker>* ms = kb.markers_of(f.collection);
    if (!ms) return std::nullopt;
    const std::optional<TimeInterval> existence = kb.existence_interval(f.entity);
    if (!existence) return std::nullopt;
    if (ms->count(Marker::Bidirectional)) return existence;
    if (ms->count(Marker::Initial)) {
        if (existence->start > known_at.end) return std::nullopt;
        return TimeInterval{existence->start, known_at.end};
    }
    if (ms->count(Marker::Terminal)) {
        if (known_at.start > existence->end) return std::nullopt;
        return TimeInterval{known_at.start, existence->end};
    }
    return std::nullopt;
}

/// Default interval from the fixed-duration rule for `f` with the latest
/// start not after `not_after`.
inline std::optional<TimeInterval> fixed_duration_interval(const Fluent& f,
                                                           const HazardRegistry& registry,
                                                           TimePoint not_after) {
    const FixedDurationRule* best = nullptr;
    for (const FixedDurationRule& r : registry.fixed_rules) {
        if (!(r.fluent == f) || r.start > not_after) continue;
        if (!best || r.start > best->start) best = &r;
    }
    if (!best) return std::nullopt;
    return TimeInterval{best->start, best->start.plus_days(best->duration_days)};
}

} // namespace tempora
