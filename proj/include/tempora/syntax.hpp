#pragma once

#include <string>
#include <vector>

#include "tempora/sexpr.hpp"
#include "tempora/time.hpp"

namespace tempora {

enum class FluentKind { Isa, Rel };

/// A ground time-varying sentence: membership of an entity in a collection,
/// or a relation between entities. Compound terms (nested lists) are carried
/// as canonical-text symbols.
struct Fluent {
    FluentKind kind = FluentKind::Isa;
    std::string entity;      // Isa subject
    std::string collection;  // Isa collection
    std::string predicate;   // Rel predicate
    std::vector<std::string> args;  // Rel arguments, in order

    bool operator==(const Fluent&) const = default;

    static Fluent isa(std::string entity, std::string collection) {
        Fluent f;
        f.kind = FluentKind::Isa;
        f.entity = std::move(entity);
        f.collection = std::move(collection);
        return f;
    }
    static Fluent rel(std::string predicate, std::vector<std::string> args) {
        Fluent f;
        f.kind = FluentKind::Rel;
        f.predicate = std::move(predicate);
        f.args = std::move(args);
        return f;
    }

    /// The individual the sentence is about: the Isa subject, or the first
    /// relation argument. Covariates and existence bounds attach here.
    const std::string& subject() const {
        if (kind == FluentKind::Isa) return entity;
        if (args.empty()) throw DataError("relation fluent with no arguments");
        return args.front();
    }

    std::string to_string() const {
        if (kind == FluentKind::Isa) return "(isa " + entity + " " + collection + ")";
        std::string out = "(rel " + predicate;
        for (const auto& a : args) out += " " + a;
        return out + ")";
    }

    static Fluent parse(const Sexpr& form, const std::string& source = "<input>");
    static Fluent parse_text(const std::string& text);
};

namespace detail {
/// An atom is taken verbatim; a nested list becomes its canonical text,
/// letting compound terms like (FrequentPerformerFn Smoking) act as names.
inline std::string symbol_of(const Sexpr& s) { return s.to_string(); }
} // namespace detail

inline Fluent Fluent::parse(const Sexpr& form, const std::string& source) {
    if (form.atom || form.items.empty() || !form.items[0].atom)
        throw ParseError(source, form.line, "expected (isa ...) or (rel ...)");
    const std::string& head = form.items[0].text;
    if (head == "isa") {
        if (form.items.size() != 3)
            throw ParseError(source, form.line, "isa takes an entity and a collection");
        return isa(detail::symbol_of(form.items[1]), detail::symbol_of(form.items[2]));
    }
    if (head == "rel") {
        if (form.items.size() < 3)
            throw ParseError(source, form.line, "rel takes a predicate and its arguments");
        std::vector<std::string> args;
        for (std::size_t i = 2; i < form.items.size(); ++i)
            args.push_back(detail::symbol_of(form.items[i]));
        return rel(detail::symbol_of(form.items[1]), std::move(args));
    }
    throw ParseError(source, form.line, "unknown fluent head '" + head + "'");
}

inline Fluent Fluent::parse_text(const std::string& text) {
    return parse(parse_sexpr(text), "<fluent>");
}

enum class PatternKind {
    Collection,  ///< matches Isa fluents of a collection:   (isa ?x Cricketer)
    RelArg,      ///< predicate + typed argument position:   (rel owns 2 Automobile)
    Predicate,   ///< bare predicate fallback:                (rel owns)
};

/// The left-hand side a hazard specification attaches to.
struct FluentPattern {
    PatternKind kind = PatternKind::Collection;
    std::string collection;
    std::string predicate;
    int arg_pos = 0;  // 1-based, RelArg only

    bool operator==(const FluentPattern&) const = default;

    static FluentPattern for_collection(std::string c) {
        FluentPattern p;
        p.kind = PatternKind::Collection;
        p.collection = std::move(c);
        return p;
    }
    static FluentPattern for_rel_arg(std::string pred, int pos, std::string c) {
        FluentPattern p;
        p.kind = PatternKind::RelArg;
        p.predicate = std::move(pred);
        p.arg_pos = pos;
        p.collection = std::move(c);
        return p;
    }
    static FluentPattern for_predicate(std::string pred) {
        FluentPattern p;
        p.kind = PatternKind::Predicate;
        p.predicate = std::move(pred);
        return p;
    }

    std::string to_string() const {
        switch (kind) {
            case PatternKind::Collection: return "(isa ?x " + collection + ")";
            case PatternKind::RelArg:
                return "(rel " + predicate + " " + std::to_string(arg_pos) + " " + collection + ")";
            case PatternKind::Predicate: return "(rel " + predicate + ")";
        }
        return {};
    }

    static FluentPattern parse(const Sexpr& form, const std::string& source = "<input>") {
        if (form.atom || form.items.empty() || !form.items[0].atom)
            throw ParseError(source, form.line, "expected a fluent pattern");
        const std::string& head = form.items[0].text;
        if (head == "isa") {
            if (form.items.size() != 3 || form.items[1].to_string() != "?x")
                throw ParseError(source, form.line, "collection pattern is (isa ?x <collection>)");
            return for_collection(detail::symbol_of(form.items[2]));
        }
        if (head == "rel") {
            if (form.items.size() == 2)
                return for_predicate(detail::symbol_of(form.items[1]));
            if (form.items.size() == 4) {
                int pos = 0;
                try {
                    pos = std::stoi(form.items[2].text);
                } catch (...) {
                    throw ParseError(source, form.line, "argument position must be an integer");
                }
                if (pos < 1) throw ParseError(source, form.line, "argument position is 1-based");
                return for_rel_arg(detail::symbol_of(form.items[1]), pos,
                                   detail::symbol_of(form.items[3]));
            }
            throw ParseError(source, form.line,
                             "relation pattern is (rel <pred>) or (rel <pred> <pos> <collection>)");
        }
        throw ParseError(source, form.line, "unknown pattern head '" + head + "'");
    }

    static FluentPattern parse_text(const std::string& text) {
        return parse(parse_sexpr(text), "<pattern>");
    }
};

/// Time forms: `1988-07-01` | bare year `1992` | `(year 1992)` |
/// `(interval 1988-07-01 1990-06-30)`. Points normalize to one-day intervals.
inline TimeInterval parse_time_form(const Sexpr& form, const std::string& source = "<input>") {
    if (form.atom) {
        if (form.text.find('-') != std::string::npos)
            return day_interval(TimePoint::parse(form.text));
        try {
            return year_interval(std::stoi(form.text));
        } catch (const Error&) {
            throw;
        } catch (...) {
            throw ParseError(source, form.line, "expected a date or year, got '" + form.text + "'");
        }
    }
    if (form.items.size() == 2 && form.items[0].atom && form.items[0].text == "year")
        return parse_time_form(form.items[1], source);
    if (form.items.size() == 3 && form.items[0].atom && form.items[0].text == "interval") {
        const TimeInterval a = parse_time_form(form.items[1], source);
        const TimeInterval b = parse_time_form(form.items[2], source);
        if (a.start > b.end)
            throw ParseError(source, form.line, "interval start after end");
        return TimeInterval{a.start, b.end};
    }
    throw ParseError(source, form.line, "expected a time form");
}

inline TimeInterval parse_time_form_text(const std::string& text) {
    return parse_time_form(parse_sexpr(text), "<time>");
}

} // namespace tempora
