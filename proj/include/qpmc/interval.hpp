#pragma once

#include "qpmc/rational.hpp"

namespace qpmc {

// Exact probability bounds; lo = hi is a point value.
struct ProbInterval {
    Rational lo;
    Rational hi;

    static ProbInterval point(Rational p) { return ProbInterval{p, p}; }

    bool is_point() const { return lo == hi; }

    bool operator==(const ProbInterval& o) const { return lo == o.lo && hi == o.hi; }
};

}  // namespace qpmc
