#pragma once

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qpmc/rational.hpp"

namespace qpmc {

enum class Cmp { Greater, Equal };

class PathFormula;
class StateFormula;
using StateFormulaPtr = std::shared_ptr<const StateFormula>;
using PathFormulaPtr = std::shared_ptr<const PathFormula>;

// PCTL / bPCTL state formulas. Probability bounds admit the closed interval [0,1]:
// the checked properties use P_{=1} and P_{>0}, so the open-interval restriction some
// texts state would make them ill-formed. Comparisons are {>, =} only.
class StateFormula {
public:
    enum class Kind { True, Atom, Not, And, Prob };

    Kind kind;
    std::string atom;        // Kind::Atom
    StateFormulaPtr lhs;     // Not (operand), And (left)
    StateFormulaPtr rhs;     // And (right)
    Cmp cmp = Cmp::Greater;  // Kind::Prob
    Rational bound;          // Kind::Prob, in [0,1]
    PathFormulaPtr path;     // Kind::Prob

    static StateFormulaPtr truth() { return make(Kind::True); }

    static StateFormulaPtr make_atom(std::string name) {
        auto f = make(Kind::Atom);
        f->atom = std::move(name);
        return f;
    }

    static StateFormulaPtr negation(StateFormulaPtr operand) {
        auto f = make(Kind::Not);
        f->lhs = std::move(operand);
        return f;
    }

    static StateFormulaPtr conjunction(StateFormulaPtr left, StateFormulaPtr right) {
        auto f = make(Kind::And);
        f->lhs = std::move(left);
        f->rhs = std::move(right);
        return f;
    }

    static StateFormulaPtr prob(Cmp cmp, Rational bound, PathFormulaPtr path) {
        if (bound < 0 || bound > 1)
            throw input_error("probability bound " + rational_str(bound) + " outside [0,1]");
        auto f = make(Kind::Prob);
        f->cmp = cmp;
        f->bound = std::move(bound);
        f->path = std::move(path);
        return f;
    }

private:
    static std::shared_ptr<StateFormula> make(Kind k) {
        auto f = std::make_shared<StateFormula>();
        f->kind = k;
        return f;
    }
};

class PathFormula {
public:
    enum class Kind { Next, Until, BoundedUntil };

    Kind kind;
    StateFormulaPtr lhs;        // Next operand, Until left
    StateFormulaPtr rhs;        // Until right
    unsigned long steps = 0;    // BoundedUntil k

    static PathFormulaPtr next(StateFormulaPtr operand) {
        auto f = std::make_shared<PathFormula>();
        f->kind = Kind::Next;
        f->lhs = std::move(operand);
        return f;
    }

    static PathFormulaPtr until(StateFormulaPtr left, StateFormulaPtr right) {
        auto f = std::make_shared<PathFormula>();
        f->kind = Kind::Until;
        f->lhs = std::move(left);
        f->rhs = std::move(right);
        return f;
    }

    static PathFormulaPtr bounded_until(StateFormulaPtr left, StateFormulaPtr right,
                                        unsigned long k) {
        auto f = std::make_shared<PathFormula>();
        f->kind = Kind::BoundedUntil;
        f->lhs = std::move(left);
        f->rhs = std::move(right);
        f->steps = k;
        return f;
    }
};

inline bool formulas_equal(const StateFormula& a, const StateFormula& b);

inline bool formulas_equal(const PathFormula& a, const PathFormula& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case PathFormula::Kind::Next:
            return formulas_equal(*a.lhs, *b.lhs);
        case PathFormula::Kind::Until:
            return formulas_equal(*a.lhs, *b.lhs) && formulas_equal(*a.rhs, *b.rhs);
        case PathFormula::Kind::BoundedUntil:
            return a.steps == b.steps && formulas_equal(*a.lhs, *b.lhs) &&
                   formulas_equal(*a.rhs, *b.rhs);
    }
    return false;
}

inline bool formulas_equal(const StateFormula& a, const StateFormula& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case StateFormula::Kind::True:
            return true;
        case StateFormula::Kind::Atom:
            return a.atom == b.atom;
        case StateFormula::Kind::Not:
            return formulas_equal(*a.lhs, *b.lhs);
        case StateFormula::Kind::And:
            return formulas_equal(*a.lhs, *b.lhs) && formulas_equal(*a.rhs, *b.rhs);
        case StateFormula::Kind::Prob:
            return a.cmp == b.cmp && a.bound == b.bound && formulas_equal(*a.path, *b.path);
    }
    return false;
}

// ---------------------------------------------------------------------------
// Horizon: the least number of transition steps satisfaction can depend on.
// nullopt means unbounded (a plain Until occurs somewhere).
// ---------------------------------------------------------------------------

inline std::optional<unsigned long> required_horizon(const StateFormula& f);

inline std::optional<unsigned long> required_horizon(const PathFormula& f) {
    switch (f.kind) {
        case PathFormula::Kind::Next: {
            auto inner = required_horizon(*f.lhs);
            if (!inner) return std::nullopt;
            return 1 + *inner;
        }
        case PathFormula::Kind::Until:
            return std::nullopt;
        case PathFormula::Kind::BoundedUntil: {
            auto l = required_horizon(*f.lhs);
            auto r = required_horizon(*f.rhs);
            if (!l || !r) return std::nullopt;
            return f.steps + std::max(*l, *r);
        }
    }
    return std::nullopt;
}

inline std::optional<unsigned long> required_horizon(const StateFormula& f) {
    switch (f.kind) {
        case StateFormula::Kind::True:
        case StateFormula::Kind::Atom:
            return 0;
        case StateFormula::Kind::Not:
            return required_horizon(*f.lhs);
        case StateFormula::Kind::And: {
            auto l = required_horizon(*f.lhs);
            auto r = required_horizon(*f.rhs);
            if (!l || !r) return std::nullopt;
            return std::max(*l, *r);
        }
        case StateFormula::Kind::Prob:
            return required_horizon(*f.path);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Rendering. Canonical text; parse_formula(render_formula(f)) reproduces f.
// ---------------------------------------------------------------------------

inline std::string render_formula(const StateFormula& f);

inline std::string render_formula(const PathFormula& f) {
    switch (f.kind) {
        case PathFormula::Kind::Next:
            return "X " + render_formula(*f.lhs);
        case PathFormula::Kind::Until:
            return render_formula(*f.lhs) + " U " + render_formula(*f.rhs);
        case PathFormula::Kind::BoundedUntil:
            return render_formula(*f.lhs) + " U<=" + std::to_string(f.steps) + " " +
                   render_formula(*f.rhs);
    }
    return {};
}

inline std::string render_formula(const StateFormula& f) {
    switch (f.kind) {
        case StateFormula::Kind::True:
            return "true";
        case StateFormula::Kind::Atom:
            return f.atom;
        case StateFormula::Kind::Not:
            return "!" + render_formula(*f.lhs);
        case StateFormula::Kind::And:
            return "(" + render_formula(*f.lhs) + " & " + render_formula(*f.rhs) + ")";
        case StateFormula::Kind::Prob:
            return std::string("P") + (f.cmp == Cmp::Greater ? ">" : "=") + rational_str(f.bound) +
                   " [ " + render_formula(*f.path) + " ]";
    }
    return {};
}

// ---------------------------------------------------------------------------
// Parsing. Grammar:
//   state := 'true' | atom | '!' state | '(' state '&' state ')' | 'P' cmp rat '[' path ']'
//   cmp   := '>' | '='
//   rat   := int | int '/' int
//   path  := 'X' state | state 'U' state | state 'U<=' int state
// Atoms are identifiers; a '(' immediately after an identifier is consumed as part of
// it, so pair-symbol names like p(A,B) or X(A,*) lex as single atoms. 'X' followed by
// whitespace-then-'(' is still the next operator.
// ---------------------------------------------------------------------------

namespace detail {

class FormulaParser {
public:
    explicit FormulaParser(std::string_view text) : text_(text) {}

    StateFormulaPtr parse() {
        auto f = parse_state();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input");
        return f;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw parse_error(what, 1, pos_ + 1);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eof() {
        skip_ws();
        return pos_ >= text_.size();
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    static bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '\'';
    }

    // Identifier, with an immediately following (...) group folded in: p(A,B), X(A,*).
    std::string lex_ident() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
        if (pos_ == start) fail("expected identifier");
        if (pos_ < text_.size() && text_[pos_] == '(') {
            std::size_t depth = 0;
            do {
                if (text_[pos_] == '(') ++depth;
                if (text_[pos_] == ')') --depth;
                ++pos_;
                if (pos_ > text_.size()) fail("unterminated '(' in identifier");
            } while (depth > 0 && pos_ < text_.size());
            if (depth > 0) fail("unterminated '(' in identifier");
        }
        return std::string(text_.substr(start, pos_ - start));
    }

    unsigned long lex_nat() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == start) fail("expected integer");
        return std::stoul(std::string(text_.substr(start, pos_ - start)));
    }

    Rational lex_rational() {
        Rational num(static_cast<long>(lex_nat()));
        if (pos_ < text_.size() && text_[pos_] == '/') {
            ++pos_;
            Rational den(static_cast<long>(lex_nat()));
            if (den == 0) fail("zero denominator");
            return num / den;
        }
        return num;
    }

    StateFormulaPtr parse_state() {
        const char c = peek();
        if (c == '\0') fail("expected state formula");
        if (c == '!') {
            ++pos_;
            return StateFormula::negation(parse_state());
        }
        if (c == '(') {
            ++pos_;
            auto left = parse_state();
            skip_ws();
            if (peek() != '&') fail("expected '&'");
            ++pos_;
            auto right = parse_state();
            expect(')');
            return StateFormula::conjunction(std::move(left), std::move(right));
        }
        std::size_t mark = pos_;
        std::string ident = lex_ident();
        if (ident == "true") return StateFormula::truth();
        if (ident == "P") {
            const char op = peek();
            if (op == '>' || op == '=') {
                ++pos_;
                if (pos_ < text_.size() && (text_[pos_] == '=' || text_[pos_] == '<'))
                    fail("only comparisons '>' and '=' are supported");
                Rational bound = lex_rational();
                if (bound < 0 || bound > 1)
                    fail("probability bound " + rational_str(bound) + " outside [0,1]");
                expect('[');
                auto path = parse_path();
                expect(']');
                return StateFormula::prob(op == '>' ? Cmp::Greater : Cmp::Equal, std::move(bound),
                                          std::move(path));
            }
            if (op == '<') fail("only comparisons '>' and '=' are supported");
        }
        if (ident == "X" || ident == "U") {
            pos_ = mark;
            fail("'" + ident + "' is reserved");
        }
        return StateFormula::make_atom(std::move(ident));
    }

    PathFormulaPtr parse_path() {
        skip_ws();
        // Next: a lone 'X' keyword. 'X(' (no gap) is a pair-form atom instead.
        if (pos_ < text_.size() && text_[pos_] == 'X' &&
            (pos_ + 1 >= text_.size() || (!ident_char(text_[pos_ + 1]) && text_[pos_ + 1] != '('))) {
            ++pos_;
            return PathFormula::next(parse_state());
        }
        auto left = parse_state();
        skip_ws();
        // The 'U' keyword must stand alone (not the start of a longer identifier).
        if (pos_ >= text_.size() || text_[pos_] != 'U' ||
            (pos_ + 1 < text_.size() && ident_char(text_[pos_ + 1])))
            fail("expected 'U' in path formula");
        ++pos_;
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '<') {
            ++pos_;
            if (pos_ >= text_.size() || text_[pos_] != '=') fail("expected '<=' after 'U'");
            ++pos_;
            unsigned long k = lex_nat();
            auto right = parse_state();
            return PathFormula::bounded_until(std::move(left), std::move(right), k);
        }
        auto right = parse_state();
        return PathFormula::until(std::move(left), std::move(right));
    }
};

}  // namespace detail

inline StateFormulaPtr parse_formula(std::string_view text) {
    return detail::FormulaParser(text).parse();
}

}  // namespace qpmc
