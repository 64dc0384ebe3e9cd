#pragma once

// Hand-rolled generators shared by the property tests.

#include <cstdint>
#include <random>

#include "kalspan/scalar.hpp"

namespace kalspan::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    long integer(long lo, long hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<long>(rng_() % span);
    }

    Rational rational(long numBound = 20, long denBound = 9) {
        return makeRational(integer(-numBound, numBound), integer(1, denBound));
    }

    Rational nonzeroRational(long numBound = 20, long denBound = 9) {
        for (;;) {
            Rational q = rational(numBound, denBound);
            if (q != 0) return q;
        }
    }

    QuadExt quad(long radicand, long numBound = 20, long denBound = 9) {
        return QuadExt(rational(numBound, denBound), rational(numBound, denBound), radicand);
    }

    bool coin() { return (rng_() & 1U) != 0; }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace kalspan::testing
