#pragma once

#include <algorithm>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qpmc/rational.hpp"

namespace qpmc {

/// Pad symbol standing for the paper's filler dot in words and symbol names.
inline constexpr char kPad = '*';

// A (possibly bounded) correspondence instance: word pairs over {A,B} plus an optional
// witness-length bound K. Words must be nonempty so padding is well defined.
struct PcpInstance {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::optional<unsigned> bound;  // K; present = bounded instance

    std::size_t size() const { return pairs.size(); }
};

struct PaddedInstance {
    PcpInstance base;
    unsigned m = 0;  // common padded length
    std::vector<std::pair<std::string, std::string>> padded;  // words over {A,B,*}
};

struct Witness {
    std::vector<unsigned> indices;  // 1-based, nonempty

    std::string str() const {
        std::string out;
        for (unsigned i : indices) {
            if (!out.empty()) out += ' ';
            out += std::to_string(i);
        }
        return out;
    }
    bool operator==(const Witness& o) const { return indices == o.indices; }
};

inline void validate_word(const std::string& w) {
    for (char c : w)
        if (c != 'A' && c != 'B')
            throw input_error(std::string("word letter '") + c + "' outside {A,B}");
}

/// Removes every pad symbol, preserving order. Idempotent.
inline std::string trim_pads(std::string_view word) {
    std::string out;
    out.reserve(word.size());
    for (char c : word)
        if (c != kPad) out += c;
    return out;
}

/// Pads every word with trailing pad symbols up to the common maximum length.
/// Pad placement does not matter to anything downstream (all uses trim first);
/// the suffix form is the canonical one.
inline PaddedInstance pad_instance(const PcpInstance& instance) {
    if (instance.pairs.empty()) throw input_error("instance has no pairs");
    PaddedInstance out;
    out.base = instance;
    std::size_t m = 0;
    for (const auto& [u, v] : instance.pairs) {
        if (u.empty() || v.empty()) throw input_error("empty word in pair (padding undefined)");
        validate_word(u);
        validate_word(v);
        m = std::max({m, u.size(), v.size()});
    }
    out.m = static_cast<unsigned>(m);
    for (const auto& [u, v] : instance.pairs) {
        std::string pu = u, pv = v;
        pu.append(m - u.size(), kPad);
        pv.append(m - v.size(), kPad);
        out.padded.emplace_back(std::move(pu), std::move(pv));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dyadic word encodings. theta scores A and the terminal Z' with 1, B with 0;
// theta_bar swaps A and B. rho(x_1..x_n) = sum theta(x_i)/2^i with the terminal
// Z' as the last indexed symbol, so two words coincide exactly when
// rho(w1 Z') + rho_bar(w2 Z') = 1.
// ---------------------------------------------------------------------------

/// Z' is passed as the character 'Z' (words themselves never contain it).
inline int theta(char x) {
    switch (x) {
        case 'Z': return 1;
        case 'A': return 1;
        case 'B': return 0;
    }
    throw input_error(std::string("theta: '") + x + "' outside {A,B,Z'}");
}

inline int theta_bar(char x) {
    switch (x) {
        case 'Z': return 1;
        case 'A': return 0;
        case 'B': return 1;
    }
    throw input_error(std::string("theta_bar: '") + x + "' outside {A,B,Z'}");
}

namespace detail {

// Accepts "ABZ" or "ABZ'"; returns the word with the terminal normalized to 'Z'.
inline std::string normalize_rho_input(std::string_view w) {
    std::string s(w);
    if (s.size() >= 2 && s.ends_with("Z'")) s.pop_back();
    if (s.empty() || s.back() != 'Z') throw input_error("rho input must end with Z'");
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (s[i] == kPad) throw input_error("rho input contains a pad symbol");
        if (s[i] != 'A' && s[i] != 'B')
            throw input_error(std::string("rho input letter '") + s[i] + "' outside {A,B}");
    }
    return s;
}

template <int (*Score)(char)>
Rational rho_impl(std::string_view w) {
    const std::string s = normalize_rho_input(w);
    Rational sum(0);
    Rational weight(1, 2);
    for (char c : s) {
        sum += Score(c) * weight;
        weight /= 2;
    }
    return sum;
}

}  // namespace detail

/// rho over a word ending in Z' (spelled "...Z" or "...Z'").
inline Rational rho(std::string_view w) { return detail::rho_impl<&theta>(w); }
inline Rational rho_bar(std::string_view w) { return detail::rho_impl<&theta_bar>(w); }

// ---------------------------------------------------------------------------
// Witness checking and the exhaustive bounded solver (the independent oracle for
// everything the encoders and the checker produce).
// ---------------------------------------------------------------------------

inline bool verify_witness(const PcpInstance& instance, const Witness& w) {
    if (w.indices.empty()) throw input_error("empty witness");
    std::string u, v;
    for (unsigned j : w.indices) {
        if (j < 1 || j > instance.pairs.size())
            throw input_error("witness index " + std::to_string(j) + " out of range");
        u += instance.pairs[j - 1].first;
        v += instance.pairs[j - 1].second;
    }
    return u == v;
}

namespace detail {

// Base-n odometer over positions [1, len); position 0 stays pinned. False on wrap.
inline bool advance_suffix(std::vector<unsigned>& seq, unsigned n) {
    for (std::size_t pos = seq.size(); pos-- > 1;) {
        if (seq[pos] < n) {
            ++seq[pos];
            std::fill(seq.begin() + static_cast<long>(pos) + 1, seq.end(), 1u);
            return true;
        }
    }
    return false;
}

// First match in (length, lexicographic) order whose sequence starts with `first`.
inline std::optional<Witness> solve_partition(const PcpInstance& instance, unsigned K,
                                              unsigned first) {
    const unsigned n = static_cast<unsigned>(instance.pairs.size());
    std::vector<unsigned> seq;
    for (unsigned len = 1; len <= K; ++len) {
        seq.assign(len, 1);
        seq[0] = first;
        do {
            if (verify_witness(instance, Witness{seq})) return Witness{seq};
        } while (advance_suffix(seq, n));
    }
    return std::nullopt;
}

}  // namespace detail

struct SolveOptions {
    unsigned jobs = 1;  // >1 parallelizes over first-index partitions
};

/// Exhaustively enumerates index sequences of length 1..K in (length, lexicographic)
/// order and returns the first solution, or nothing. The parallel path partitions on
/// the first index and still returns the globally least witness.
inline std::optional<Witness> solve_bounded(const PcpInstance& instance, unsigned K,
                                            SolveOptions options = {}) {
    if (K < 1) throw input_error("bound K must be at least 1");
    if (instance.pairs.empty()) throw input_error("instance has no pairs");
    for (const auto& [u, v] : instance.pairs) {
        validate_word(u);
        validate_word(v);
    }
    const unsigned n = static_cast<unsigned>(instance.pairs.size());

    if (options.jobs <= 1) {
        std::optional<Witness> best;
        for (unsigned first = 1; first <= n; ++first) {
            auto w = detail::solve_partition(instance, K, first);
            if (w && (!best || w->indices.size() < best->indices.size() ||
                      (w->indices.size() == best->indices.size() && w->indices < best->indices)))
                best = w;
        }
        return best;
    }

    std::vector<std::future<std::optional<Witness>>> futures;
    futures.reserve(n);
    for (unsigned first = 1; first <= n; ++first) {
        futures.push_back(std::async(std::launch::async, [&instance, K, first] {
            return detail::solve_partition(instance, K, first);
        }));
    }
    std::optional<Witness> best;
    for (auto& fut : futures) {
        auto w = fut.get();
        if (w && (!best || w->indices.size() < best->indices.size() ||
                  (w->indices.size() == best->indices.size() && w->indices < best->indices)))
            best = w;
    }
    return best;
}

// ---------------------------------------------------------------------------
// File format:
//   pcp v1
//   alphabet: A B
//   pair: A AA
//   k: 2            # optional; presence marks the bounded problem
// ---------------------------------------------------------------------------

inline PcpInstance parse_pcp(std::string_view text) {
    PcpInstance inst;
    bool saw_header = false;
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

        std::istringstream is{std::string(raw)};
        std::vector<std::string> tokens;
        for (std::string t; is >> t;) tokens.push_back(t);
        if (tokens.empty()) continue;

        if (!saw_header) {
            if (tokens.size() != 2 || tokens[0] != "pcp" || tokens[1] != "v1")
                throw parse_error("expected header 'pcp v1'", line_no, 1);
            saw_header = true;
            continue;
        }
        if (tokens[0] == "alphabet:") {
            for (std::size_t i = 1; i < tokens.size(); ++i)
                if (tokens[i] != "A" && tokens[i] != "B")
                    throw parse_error("alphabet must be a subset of {A, B}", line_no, 1);
        } else if (tokens[0] == "pair:") {
            if (tokens.size() != 3) throw parse_error("expected 'pair: u v'", line_no, 1);
            try {
                validate_word(tokens[1]);
                validate_word(tokens[2]);
            } catch (const input_error& e) {
                throw parse_error(e.what(), line_no, 1);
            }
            inst.pairs.emplace_back(tokens[1], tokens[2]);
        } else if (tokens[0] == "k:") {
            if (tokens.size() != 2) throw parse_error("expected 'k: K'", line_no, 1);
            try {
                const int k = std::stoi(tokens[1]);
                if (k < 1) throw parse_error("K must be >= 1", line_no, 1);
                inst.bound = static_cast<unsigned>(k);
            } catch (const parse_error&) {
                throw;
            } catch (const std::exception&) {
                throw parse_error("bad bound '" + tokens[1] + "'", line_no, 1);
            }
        } else {
            throw parse_error("unknown directive '" + tokens[0] + "'", line_no, 1);
        }
    }
    if (!saw_header) throw parse_error("missing 'pcp v1' header", line_no, 1);
    if (inst.pairs.empty()) throw parse_error("instance has no pairs", line_no, 1);
    return inst;
}

inline std::string render_pcp(const PcpInstance& inst) {
    std::ostringstream out;
    out << "pcp v1\nalphabet: A B\n";
    for (const auto& [u, v] : inst.pairs) out << "pair: " << u << ' ' << v << '\n';
    if (inst.bound) out << "k: " << *inst.bound << '\n';
    return out.str();
}

}  // namespace qpmc
