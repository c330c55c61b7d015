#pragma once

#include <string>
#include <vector>

#include "tempora/error.hpp"

namespace tempora {

/// One S-expression node: a bare atom or a list of nodes. Atoms are
/// undifferentiated token text; consumers interpret them as symbols,
/// numbers, or dates. `line` is the 1-based source line for diagnostics.
struct Sexpr {
    bool atom = true;
    std::string text;
    std::vector<Sexpr> items;
    int line = 0;

    bool is_list() const { return !atom; }

    /// Canonical text. Lists print as "(a b (c d))"; used both for output
    /// and for treating compound terms as structured symbol names.
    std::string to_string() const {
        if (atom) return text;
        std::string out = "(";
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) out += ' ';
            out += items[i].to_string();
        }
        out += ')';
        return out;
    }

    static Sexpr make_atom(std::string t, int line = 0) {
        Sexpr s;
        s.atom = true;
        s.text = std::move(t);
        s.line = line;
        return s;
    }
    static Sexpr make_list(std::vector<Sexpr> xs, int line = 0) {
        Sexpr s;
        s.atom = false;
        s.items = std::move(xs);
        s.line = line;
        return s;
    }
};

namespace detail {

struct SexprReader {
    const std::string& text;
    const std::string& source;
    std::size_t pos = 0;
    int line = 1;

    void skip_blank() {
        while (pos < text.size()) {
            const char c = text[pos];
            if (c == ';') {
                while (pos < text.size() && text[pos] != '\n') ++pos;
            } else if (c == '\n') {
                ++line;
                ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                ++pos;
            } else {
                break;
            }
        }
    }

    static bool is_delim(char c) {
        return c == '(' || c == ')' || c == ';' || c == ' ' || c == '\t' || c == '\r' ||
               c == '\n';
    }

    Sexpr read() {
        skip_blank();
        if (pos >= text.size()) throw ParseError(source, line, "unexpected end of input");
        if (text[pos] == '(') {
            const int open_line = line;
            ++pos;
            std::vector<Sexpr> items;
            while (true) {
                skip_blank();
                if (pos >= text.size())
                    throw ParseError(source, open_line, "unclosed '('");
                if (text[pos] == ')') {
                    ++pos;
                    return Sexpr::make_list(std::move(items), open_line);
                }
                items.push_back(read());
            }
        }
        if (text[pos] == ')') throw ParseError(source, line, "unmatched ')'");
        const std::size_t begin = pos;
        while (pos < text.size() && !is_delim(text[pos])) ++pos;
        return Sexpr::make_atom(text.substr(begin, pos - begin), line);
    }
};

} // namespace detail

/// Reads every top-level form in `text`. `source` labels diagnostics.
inline std::vector<Sexpr> parse_sexprs(const std::string& text,
                                       const std::string& source = "<input>") {
    detail::SexprReader reader{text, source};
    std::vector<Sexpr> forms;
    while (true) {
        reader.skip_blank();
        if (reader.pos >= text.size()) break;
        forms.push_back(reader.read());
    }
    return forms;
}

/// Reads exactly one form; trailing content is an error.
inline Sexpr parse_sexpr(const std::string& text, const std::string& source = "<input>") {
    detail::SexprReader reader{text, source};
    Sexpr form = reader.read();
    reader.skip_blank();
    if (reader.pos < text.size())
        throw ParseError(source, reader.line, "trailing content after expression");
    return form;
}

/// Splits a form's items into leading positional items and trailing
/// ":keyword value" pairs (keywords may appear in any order after the head).
struct KeywordArgs {
    std::vector<const Sexpr*> positional;
    std::vector<std::pair<std::string, const Sexpr*>> keyword;

    const Sexpr* find(const std::string& key) const {
        for (const auto& [k, v] : keyword)
            if (k == key) return v;
        return nullptr;
    }
    const Sexpr& require(const std::string& key, const std::string& form,
                         const std::string& source, int line) const {
        if (const Sexpr* s = find(key)) return *s;
        throw ParseError(source, line, form + " is missing required " + key);
    }
};

inline KeywordArgs split_keywords(const Sexpr& form, std::size_t first,
                                  const std::string& source) {
    KeywordArgs out;
    std::size_t i = first;
    while (i < form.items.size()) {
        const Sexpr& item = form.items[i];
        if (item.atom && !item.text.empty() && item.text[0] == ':') {
            if (i + 1 >= form.items.size())
                throw ParseError(source, item.line, item.text + " has no value");
            out.keyword.emplace_back(item.text, &form.items[i + 1]);
            i += 2;
        } else {
            out.positional.push_back(&item);
            ++i;
        }
    }
    return out;
}

} // namespace tempora
