#pragma once

#include <cctype>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qpmc/qpds.hpp"

namespace qpmc {

// Line-oriented system description, UTF-8, '#' comments:
//
//   qpds v1
//   states: q0              # optional; omit for a stateless system
//   stack: Z Zp C F S N p(A,B) X(A,B) ...
//   start: Z                # control state prepended when declared
//   rule: Z -> G1_1 Zp @ 1/2 % 6.2831853
//   rule: F -> - @ 1        # '-' is the empty rhs; phase defaults to 2pi
//   label: hot => C N       # optional explicit assignment over heads
//
// '@' introduces mod2 as 'p/q' or an integer, '%' the phase in radians.

namespace detail {

inline std::vector<std::string> split_tokens(std::string_view line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.emplace_back(line.substr(start, i - start));
    }
    return out;
}

inline std::string format_phase(double phase) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", phase);
    return buf;
}

inline Head parse_head_token(const PushdownSystem& sys, const std::string& tok,
                             std::size_t line_no) {
    Head h;
    if (!sys.stateless()) {
        if (auto ctl = sys.find_control(tok)) {
            h.control = *ctl;
            h.symbol = -1;
            return h;
        }
        const auto dot = tok.find('.');
        if (dot != std::string::npos) {
            const auto ctl = sys.find_control(tok.substr(0, dot));
            const auto sym = sys.find_symbol(tok.substr(dot + 1));
            if (ctl && sym) {
                h.control = *ctl;
                h.symbol = static_cast<std::int32_t>(*sym);
                return h;
            }
        }
        throw parse_error("unknown head '" + tok + "'", line_no, 1);
    }
    if (auto sym = sys.find_symbol(tok)) {
        h.symbol = static_cast<std::int32_t>(*sym);
        return h;
    }
    throw parse_error("unknown head '" + tok + "'", line_no, 1);
}

}  // namespace detail

inline PushdownSystem parse_system(std::string_view text) {
    PushdownSystem sys;
    bool saw_header = false;
    bool saw_stack = false;
    bool saw_start = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const auto hash = raw.find('#'); hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        auto tokens = detail::split_tokens(raw);
        if (tokens.empty()) continue;

        if (!saw_header) {
            if (tokens.size() != 2 || tokens[0] != "qpds" || tokens[1] != "v1")
                throw parse_error("expected header 'qpds v1'", line_no, 1);
            saw_header = true;
            continue;
        }

        const std::string& key = tokens[0];
        if (key == "states:") {
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                if (sys.find_control(tokens[i]))
                    throw parse_error("duplicate control state '" + tokens[i] + "'", line_no, 1);
                sys.controls.push_back(tokens[i]);
            }
        } else if (key == "stack:") {
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                if (sys.find_symbol(tokens[i]))
                    throw parse_error("duplicate stack symbol '" + tokens[i] + "'", line_no, 1);
                sys.symbols.push_back(tokens[i]);
            }
            saw_stack = true;
        } else if (key == "start:") {
            if (!saw_stack) throw parse_error("'start:' before 'stack:'", line_no, 1);
            std::string joined;
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                if (i > 1) joined += ' ';
                joined += tokens[i];
            }
            try {
                sys.start = sys.parse_configuration(joined);
            } catch (const input_error& e) {
                throw parse_error(e.what(), line_no, 1);
            }
            saw_start = true;
        } else if (key == "rule:") {
            if (!saw_stack) throw parse_error("'rule:' before 'stack:'", line_no, 1);
            // rule: [ctl] SYM -> [ctl] SYM* | '-'  @ mod2 [% phase]
            std::size_t i = 1;
            auto at = std::find(tokens.begin(), tokens.end(), "@");
            auto arrow = std::find(tokens.begin(), tokens.end(), "->");
            if (arrow == tokens.end() || at == tokens.end() || at < arrow)
                throw parse_error("malformed rule (expected 'lhs -> rhs @ mod2')", line_no, 1);
            const std::size_t arrow_idx = static_cast<std::size_t>(arrow - tokens.begin());
            const std::size_t at_idx = static_cast<std::size_t>(at - tokens.begin());

            Rule r;
            try {
                if (sys.stateless()) {
                    if (arrow_idx != 2) throw parse_error("expected one lhs symbol", line_no, 1);
                    r.lhs_symbol = sys.symbol_id(tokens[i]);
                } else {
                    if (arrow_idx != 3)
                        throw parse_error("expected 'control symbol' lhs", line_no, 1);
                    r.lhs_state = sys.control_id(tokens[i]);
                    r.lhs_symbol = sys.symbol_id(tokens[i + 1]);
                }
                std::size_t j = arrow_idx + 1;
                if (!sys.stateless()) {
                    if (j >= at_idx) throw parse_error("missing rhs control state", line_no, 1);
                    r.rhs_state = sys.control_id(tokens[j]);
                    ++j;
                }
                for (; j < at_idx; ++j) {
                    if (tokens[j] == "-") continue;  // explicit epsilon
                    r.rhs.push_back(sys.symbol_id(tokens[j]));
                }
            } catch (const input_error& e) {
                throw parse_error(e.what(), line_no, 1);
            }

            if (at_idx + 1 >= tokens.size())
                throw parse_error("missing mod2 after '@'", line_no, 1);
            try {
                r.amp.mod2 = parse_rational(tokens[at_idx + 1]);
            } catch (const parse_error& e) {
                throw parse_error(e.what(), line_no, 1);
            }
            if (r.amp.mod2 < 0) throw parse_error("negative mod2", line_no, 1);
            r.amp.phase = kTwoPi;
            if (at_idx + 2 < tokens.size()) {
                if (tokens[at_idx + 2] != "%" || at_idx + 3 >= tokens.size())
                    throw parse_error("expected '% phase'", line_no, 1);
                try {
                    r.amp.phase = std::stod(tokens[at_idx + 3]);
                } catch (const std::exception&) {
                    throw parse_error("bad phase '" + tokens[at_idx + 3] + "'", line_no, 1);
                }
                if (at_idx + 4 < tokens.size())
                    throw parse_error("trailing tokens after phase", line_no, 1);
            }
            sys.rules.push_back(std::move(r));
        } else if (key == "label:") {
            // label: ap => head head ...
            if (tokens.size() < 3 || tokens[2] != "=>")
                throw parse_error("malformed label (expected 'label: ap => heads')", line_no, 1);
            std::vector<Head>& heads = sys.assignment.sets[tokens[1]];
            for (std::size_t j = 3; j < tokens.size(); ++j)
                heads.push_back(detail::parse_head_token(sys, tokens[j], line_no));
        } else {
            throw parse_error("unknown directive '" + key + "'", line_no, 1);
        }
    }

    if (!saw_header) throw parse_error("missing 'qpds v1' header", line_no, 1);
    if (!saw_stack) throw parse_error("missing 'stack:' line", line_no, 1);
    if (!saw_start) throw parse_error("missing 'start:' line", line_no, 1);
    return sys;
}

inline std::string render_system(const PushdownSystem& sys) {
    std::ostringstream out;
    out << "qpds v1\n";
    if (!sys.stateless()) {
        out << "states:";
        for (const auto& c : sys.controls) out << ' ' << c;
        out << '\n';
    }
    out << "stack:";
    for (const auto& s : sys.symbols) out << ' ' << s;
    out << '\n';
    out << "start: " << sys.render_configuration(sys.start) << '\n';
    for (const Rule& r : sys.rules) {
        out << "rule: ";
        if (!sys.stateless()) out << sys.controls[r.lhs_state] << ' ';
        out << sys.symbols[r.lhs_symbol] << " -> ";
        if (!sys.stateless()) out << sys.controls[r.rhs_state] << ' ';
        if (r.rhs.empty()) {
            out << "- ";
        } else {
            for (SymbolId s : r.rhs) out << sys.symbols[s] << ' ';
        }
        out << "@ " << rational_str(r.amp.mod2) << " % " << detail::format_phase(r.amp.phase)
            << '\n';
    }
    for (const auto& [ap, heads] : sys.assignment.sets) {
        out << "label: " << ap << " =>";
        for (const Head& h : heads) out << ' ' << sys.spell_head(h);
        out << '\n';
    }
    return out.str();
}

}  // namespace qpmc
