#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qpmc/amplitude.hpp"
#include "qpmc/rational.hpp"

namespace qpmc {

using SymbolId = std::uint32_t;
using ControlId = std::uint32_t;

/// Reserved proposition carried by empty-stack (absorbing) configurations.
inline constexpr std::string_view kEmptyLabel = "empty";

struct Rule {
    ControlId lhs_state = 0;
    SymbolId lhs_symbol = 0;
    ControlId rhs_state = 0;
    std::vector<SymbolId> rhs;  // empty = pop
    Amplitude amp;
};

/// Control state plus stack string; leftmost stack entry is the top.
struct Configuration {
    ControlId control = 0;
    std::vector<SymbolId> stack;

    bool operator==(const Configuration& o) const {
        return control == o.control && stack == o.stack;
    }
};

struct ConfigurationHash {
    std::size_t operator()(const Configuration& c) const {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](std::uint64_t v) {
            h ^= v;
            h *= 1099511628211ull;
        };
        mix(c.control);
        for (SymbolId s : c.stack) mix(s + 1);
        return static_cast<std::size_t>(h);
    }
};

/// Head of a configuration: (control, top symbol), or control alone for an empty stack.
struct Head {
    ControlId control = 0;
    std::int32_t symbol = -1;  // -1 = empty stack

    bool empty_stack() const { return symbol < 0; }
    bool operator==(const Head& o) const { return control == o.control && symbol == o.symbol; }
    bool operator<(const Head& o) const {
        return control != o.control ? control < o.control : symbol < o.symbol;
    }
};

// Simple assignment: each atomic proposition owns a set of heads. A head covered by
// any explicit set is labeled by exactly the propositions whose sets contain it; an
// uncovered head keeps the default identity labeling (the proposition spelled like the
// head itself).
struct SimpleAssignment {
    std::map<std::string, std::vector<Head>> sets;

    bool empty() const { return sets.empty(); }

    bool covers(const Head& h) const {
        for (const auto& [ap, heads] : sets)
            if (std::find(heads.begin(), heads.end(), h) != heads.end()) return true;
        return false;
    }

    std::vector<std::string> propositions_of(const Head& h) const {
        std::vector<std::string> out;
        for (const auto& [ap, heads] : sets)
            if (std::find(heads.begin(), heads.end(), h) != heads.end()) out.push_back(ap);
        return out;
    }
};

// A quantum pushdown system. An empty control set models the stateless case (qBPA):
// configurations are bare stack strings and head spellings drop the control component.
struct PushdownSystem {
    std::vector<std::string> controls;  // empty = stateless
    std::vector<std::string> symbols;   // stack alphabet
    std::vector<Rule> rules;
    SimpleAssignment assignment;
    Configuration start;

    bool stateless() const { return controls.empty(); }
    std::size_t control_count() const { return stateless() ? 1 : controls.size(); }

    std::optional<SymbolId> find_symbol(std::string_view name) const {
        for (SymbolId i = 0; i < symbols.size(); ++i)
            if (symbols[i] == name) return i;
        return std::nullopt;
    }

    SymbolId symbol_id(std::string_view name) const {
        if (auto id = find_symbol(name)) return *id;
        throw input_error("unknown stack symbol '" + std::string(name) + "'");
    }

    SymbolId add_symbol(std::string name) {
        if (find_symbol(name)) throw input_error("duplicate stack symbol '" + name + "'");
        symbols.push_back(std::move(name));
        return static_cast<SymbolId>(symbols.size() - 1);
    }

    std::optional<ControlId> find_control(std::string_view name) const {
        for (ControlId i = 0; i < controls.size(); ++i)
            if (controls[i] == name) return i;
        return std::nullopt;
    }

    ControlId control_id(std::string_view name) const {
        if (auto id = find_control(name)) return *id;
        throw input_error("unknown control state '" + std::string(name) + "'");
    }

    std::string spell_head(const Head& h) const {
        if (h.empty_stack()) return stateless() ? std::string(kEmptyLabel) : controls[h.control];
        const std::string& sym = symbols[static_cast<SymbolId>(h.symbol)];
        return stateless() ? sym : controls[h.control] + "." + sym;
    }

    /// Parses "F p(A,A) Zp" (optionally "q0 Z ..." when stateful) into a configuration.
    Configuration parse_configuration(std::string_view text) const {
        Configuration c;
        std::vector<std::string> tokens;
        std::size_t i = 0;
        while (i < text.size()) {
            while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
            std::size_t start = i;
            while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
            if (i > start) tokens.emplace_back(text.substr(start, i - start));
        }
        std::size_t first = 0;
        if (!stateless() && !tokens.empty()) {
            if (auto ctl = find_control(tokens[0])) {
                c.control = *ctl;
                first = 1;
            }
        }
        for (std::size_t t = first; t < tokens.size(); ++t) c.stack.push_back(symbol_id(tokens[t]));
        return c;
    }

    std::string render_configuration(const Configuration& c) const {
        std::string out;
        if (!stateless()) out += controls[c.control];
        for (SymbolId s : c.stack) {
            if (!out.empty()) out += ' ';
            out += symbols[s];
        }
        return out;
    }
};

inline Head head_of(const Configuration& c) {
    Head h;
    h.control = c.control;
    h.symbol = c.stack.empty() ? -1 : static_cast<std::int32_t>(c.stack.front());
    return h;
}

/// Successors with amplitudes, in rule-table order. Empty-stack configurations are
/// absorbing: one self-loop with the identity amplitude, keeping the induced chain total.
inline std::vector<std::pair<Configuration, Amplitude>> successors(const PushdownSystem& sys,
                                                                   const Configuration& c) {
    std::vector<std::pair<Configuration, Amplitude>> out;
    if (c.stack.empty()) {
        out.emplace_back(c, Amplitude::identity());
        return out;
    }
    const SymbolId top = c.stack.front();
    if (top >= sys.symbols.size()) throw input_error("configuration uses unknown stack symbol");
    for (const Rule& r : sys.rules) {
        if (r.lhs_state != c.control || r.lhs_symbol != top) continue;
        Configuration next;
        next.control = r.rhs_state;
        next.stack.reserve(r.rhs.size() + c.stack.size() - 1);
        next.stack.insert(next.stack.end(), r.rhs.begin(), r.rhs.end());
        next.stack.insert(next.stack.end(), c.stack.begin() + 1, c.stack.end());
        out.emplace_back(std::move(next), r.amp);
    }
    return out;
}

/// Propositions of a configuration under the system's assignment (see SimpleAssignment).
/// Empty-stack configurations always carry the reserved `empty` proposition.
inline std::vector<std::string> labels_of(const PushdownSystem& sys, const Configuration& c) {
    const Head h = head_of(c);
    std::vector<std::string> out;
    if (!sys.assignment.empty() && sys.assignment.covers(h)) {
        out = sys.assignment.propositions_of(h);
    } else {
        out.push_back(sys.spell_head(h));
    }
    if (h.empty_stack()) {
        const std::string empty(kEmptyLabel);
        if (std::find(out.begin(), out.end(), empty) == out.end()) out.push_back(empty);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class IssueKind {
    Normalization,   // a (control, symbol) row's mod2 values do not sum to 1
    Totality,        // a symbol heads no rule
    RhsLength,       // strict mode: |rhs| > 2
    SymbolTable,     // rule references an out-of-range symbol/control
    PhaseRange,      // phase outside (0, 2pi]
    Mod2Range,       // mod2 outside [0, 1]
};

struct ValidationIssue {
    IssueKind kind;
    std::string subject;  // offending head / symbol spelling
    std::string detail;
};

struct SystemReport {
    std::vector<ValidationIssue> issues;
    std::vector<std::string> warnings;

    bool ok() const { return issues.empty(); }

    std::size_t count(IssueKind k) const {
        std::size_t n = 0;
        for (const auto& i : issues)
            if (i.kind == k) ++n;
        return n;
    }
};

/// Def-style well-formedness checks: exact per-LHS normalization, rule totality over the
/// alphabet, symbol-table closure, and (strict only) the |rhs| <= 2 bound. Violations are
/// report entries, never exceptions.
inline SystemReport validate_system(const PushdownSystem& sys, bool strict = true) {
    SystemReport report;
    const std::size_t n_controls = sys.control_count();

    for (const Rule& r : sys.rules) {
        if (r.lhs_symbol >= sys.symbols.size() || r.lhs_state >= n_controls ||
            r.rhs_state >= n_controls) {
            report.issues.push_back({IssueKind::SymbolTable, "", "rule references unknown id"});
            continue;
        }
        for (SymbolId s : r.rhs) {
            if (s >= sys.symbols.size())
                report.issues.push_back({IssueKind::SymbolTable, sys.symbols[r.lhs_symbol],
                                         "rhs references unknown symbol id"});
        }
        if (strict && r.rhs.size() > 2) {
            report.issues.push_back({IssueKind::RhsLength, sys.symbols[r.lhs_symbol],
                                     "rhs length " + std::to_string(r.rhs.size()) + " > 2"});
        }
        if (r.amp.mod2 < 0 || r.amp.mod2 > 1) {
            report.issues.push_back({IssueKind::Mod2Range, sys.symbols[r.lhs_symbol],
                                     "mod2 " + rational_str(r.amp.mod2) + " outside [0,1]"});
        }
        if (!(r.amp.phase > 0.0 && r.amp.phase <= kTwoPi)) {
            report.issues.push_back({IssueKind::PhaseRange, sys.symbols[r.lhs_symbol],
                                     "phase outside (0, 2pi]"});
        }
    }
    if (report.count(IssueKind::SymbolTable) > 0)
        return report;  // row sums are meaningless with a broken table

    for (ControlId p = 0; p < n_controls; ++p) {
        for (SymbolId x = 0; x < sys.symbols.size(); ++x) {
            Rational sum(0);
            std::size_t count = 0;
            for (const Rule& r : sys.rules) {
                if (r.lhs_state == p && r.lhs_symbol == x) {
                    sum += r.amp.mod2;
                    ++count;
                }
            }
            const Head h{p, static_cast<std::int32_t>(x)};
            if (count == 0) {
                report.issues.push_back(
                    {IssueKind::Totality, sys.spell_head(h), "no rule for this head"});
            } else if (sum != 1) {
                report.issues.push_back({IssueKind::Normalization, sys.spell_head(h),
                                         "row sums to " + rational_str(sum)});
            }
        }
    }

    report.warnings.push_back(
        "empty-stack configurations are absorbing self-loops labeled 'empty' (toolkit "
        "convention; their behavior is otherwise unspecified)");
    return report;
}

}  // namespace qpmc
