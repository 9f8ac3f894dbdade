#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qpmc/amplitude.hpp"
#include "qpmc/rational.hpp"

namespace qpmc {

/// One row of an evolution operator: (target state, amplitude) entries.
using AmplitudeRow = std::vector<std::pair<std::size_t, Amplitude>>;

// A finite quantum Markov chain given explicitly: every state must have at least one
// outgoing transition and every row's mod2 values must sum to 1 exactly.
struct FiniteQmc {
    std::vector<std::string> states;
    std::vector<AmplitudeRow> transitions;  // transitions[i] = row of state i

    std::size_t state_count() const { return states.size(); }

    std::size_t index_of(std::string_view name) const {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == name) return i;
        throw input_error("unknown state '" + std::string(name) + "'");
    }
};

/// A nonempty sequence of state indices whose consecutive entries must be transitions.
struct PathPrefix {
    std::vector<std::size_t> states;
};

struct NormalizationViolation {
    std::size_t state;
    Rational sum;
};

struct NormalizationReport {
    std::vector<NormalizationViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks that every row sums to 1 in mod2, exactly. Violations are data, not errors.
inline NormalizationReport validate_normalization(const FiniteQmc& chain) {
    NormalizationReport report;
    for (std::size_t i = 0; i < chain.transitions.size(); ++i) {
        Rational sum(0);
        for (const auto& [target, amp] : chain.transitions[i]) {
            (void)target;
            sum += amp.mod2;
        }
        if (sum != 1) report.violations.push_back({i, sum});
    }
    return report;
}

/// Amplitudes along a path prefix; throws input_error when a step is not a transition.
inline std::vector<Amplitude> prefix_amplitudes(const FiniteQmc& chain, const PathPrefix& prefix) {
    if (prefix.states.empty()) throw input_error("empty path prefix");
    std::vector<Amplitude> amps;
    amps.reserve(prefix.states.size() - 1);
    for (std::size_t i = 0; i + 1 < prefix.states.size(); ++i) {
        const std::size_t src = prefix.states[i];
        const std::size_t dst = prefix.states[i + 1];
        if (src >= chain.transitions.size()) throw input_error("state index out of range");
        bool found = false;
        for (const auto& [target, amp] : chain.transitions[src]) {
            if (target == dst) {
                amps.push_back(amp);
                found = true;
                break;
            }
        }
        if (!found)
            throw input_error("no transition " + chain.states[src] + " -> " + chain.states[dst]);
    }
    return amps;
}

/// Probability of Cyl(prefix), exact.
inline Rational prefix_probability(const FiniteQmc& chain, const PathPrefix& prefix) {
    const auto amps = prefix_amplitudes(chain, prefix);
    return path_probability(std::span<const Amplitude>(amps.data(), amps.size()));
}

/// Complex inner product of two rows over a shared target space; true iff its modulus
/// is within tol of zero. Floating-point by necessity (phases are floating); this check
/// is a diagnostic, never a gate.
inline bool check_orthogonality(const AmplitudeRow& row_i, const AmplitudeRow& row_j,
                                double tol = 1e-9) {
    std::unordered_map<std::size_t, std::complex<double>> lhs;
    lhs.reserve(row_i.size());
    for (const auto& [target, amp] : row_i) lhs[target] += amp.approx();
    std::complex<double> inner{0.0, 0.0};
    for (const auto& [target, amp] : row_j) {
        auto it = lhs.find(target);
        if (it != lhs.end()) inner += it->second * std::conj(amp.approx());
    }
    return std::abs(inner) <= tol;
}

}  // namespace qpmc
