#pragma once

#include <cmath>
#include <complex>
#include <initializer_list>
#include <numbers>
#include <span>

#include "qpmc/rational.hpp"

namespace qpmc {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi_v<double>;

/// Reduces an angle into the canonical range (0, 2pi]; the identity phase is 2pi, never 0.
inline double canonical_phase(double radians) {
    double r = std::fmod(radians, kTwoPi);
    if (r <= 0.0) r += kTwoPi;
    return r;
}

// A transition weight: exact squared modulus plus a floating phase. Probabilities only ever
// read mod2 (phases cancel in |.|^2 of a product), so every verdict downstream is exact; the
// phase is kept for orthogonality diagnostics.
struct Amplitude {
    Rational mod2;          // squared modulus, >= 0
    double phase = kTwoPi;  // radians in (0, 2pi]

    static Amplitude identity() { return Amplitude{Rational(1), kTwoPi}; }

    /// Floating-point value sqrt(mod2) * e^(i*phase), for diagnostics only.
    std::complex<double> approx() const {
        const double mag = std::sqrt(rational_double(mod2));
        return std::polar(mag, phase);
    }

    bool operator==(const Amplitude& other) const {
        return mod2 == other.mod2 && phase == other.phase;
    }
};

/// Componentwise product: mod2 values multiply exactly, phases add mod 2pi.
/// The empty product is the identity amplitude (mod2 = 1, phase = 2pi).
inline Amplitude amp_product(std::span<const Amplitude> factors) {
    Amplitude out = Amplitude::identity();
    double phase_sum = 0.0;
    for (const Amplitude& a : factors) {
        out.mod2 *= a.mod2;
        phase_sum += a.phase;
    }
    out.phase = factors.empty() ? kTwoPi : canonical_phase(phase_sum);
    return out;
}

inline Amplitude amp_product(std::initializer_list<Amplitude> factors) {
    return amp_product(std::span<const Amplitude>(factors.begin(), factors.size()));
}

/// Probability of the cylinder of a path whose steps carry these amplitudes:
/// |prod a_i|^2 = prod |a_i|^2, exactly. Phases never enter.
inline Rational path_probability(std::span<const Amplitude> amps) {
    Rational p(1);
    for (const Amplitude& a : amps) p *= a.mod2;
    return p;
}

inline Rational path_probability(std::initializer_list<Amplitude> amps) {
    return path_probability(std::span<const Amplitude>(amps.begin(), amps.size()));
}

}  // namespace qpmc
