#pragma once

#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kalspan/scalar.hpp"

namespace kalspan {

using Coord = std::size_t;
using CoordSet = std::set<Coord>;

/// Finitely supported vector over coordinates 0, 1, 2, ... Zero entries are never stored.
class SparseVector {
public:
    using Entries = std::map<Coord, Scalar>;

    SparseVector() = default;
    SparseVector(std::initializer_list<std::pair<const Coord, Scalar>> init) {
        for (const auto& [i, s] : init) set(i, s);
    }
    explicit SparseVector(const Entries& entries) {
        for (const auto& [i, s] : entries) set(i, s);
    }

    static SparseVector unit(Coord i, const Scalar& s = Scalar(1)) {
        SparseVector v;
        v.set(i, s);
        return v;
    }

    /// Dense constructor: entry j goes to coordinate j.
    static SparseVector fromDense(const std::vector<Scalar>& values) {
        SparseVector v;
        for (Coord j = 0; j < values.size(); ++j) v.set(j, values[j]);
        return v;
    }

    void set(Coord i, const Scalar& s) {
        if (s.isZero()) {
            entries_.erase(i);
        } else {
            entries_.insert_or_assign(i, s);
        }
    }

    Scalar get(Coord i) const {
        const auto it = entries_.find(i);
        return it == entries_.end() ? Scalar() : it->second;
    }

    const Entries& entries() const { return entries_; }
    bool isZero() const { return entries_.empty(); }
    bool isExact() const {
        for (const auto& [i, s] : entries_) {
            if (!s.isExact()) return false;
        }
        return true;
    }

    CoordSet support() const {
        CoordSet out;
        for (const auto& [i, s] : entries_) out.insert(i);
        return out;
    }

    std::optional<Coord> firstCoord() const {
        if (entries_.empty()) return std::nullopt;
        return entries_.begin()->first;
    }

    std::optional<Coord> lastCoord() const {
        if (entries_.empty()) return std::nullopt;
        return entries_.rbegin()->first;
    }

    SparseVector restrictedTo(const CoordSet& coords) const {
        SparseVector out;
        for (const auto& [i, s] : entries_) {
            if (coords.count(i) != 0) out.entries_.emplace(i, s);
        }
        return out;
    }

    SparseVector& operator+=(const SparseVector& other) {
        for (const auto& [i, s] : other.entries_) set(i, get(i) + s);
        return *this;
    }
    SparseVector& operator-=(const SparseVector& other) {
        for (const auto& [i, s] : other.entries_) set(i, get(i) - s);
        return *this;
    }

    friend SparseVector operator+(SparseVector x, const SparseVector& y) { return x += y; }
    friend SparseVector operator-(SparseVector x, const SparseVector& y) { return x -= y; }

    friend SparseVector operator*(const Scalar& s, const SparseVector& x) {
        SparseVector out;
        if (s.isZero()) return out;
        for (const auto& [i, v] : x.entries_) out.set(i, s * v);
        return out;
    }

    SparseVector operator-() const { return Scalar(-1) * *this; }

    friend bool operator==(const SparseVector& x, const SparseVector& y) { return x.entries_ == y.entries_; }

private:
    Entries entries_;
};

/// The ambient topological vector space: sup-normed R^d or the product R^(omega).
struct AmbientSpace {
    enum class Kind { EuclideanSup, ProductOmega };

    Kind kind = Kind::ProductOmega;
    std::size_t dim = 0;  // EuclideanSup only

    static AmbientSpace euclidean(std::size_t d) {
        if (d == 0) throw PreconditionViolation("EuclideanSup dimension must be positive");
        return {Kind::EuclideanSup, d};
    }
    static AmbientSpace product() { return {Kind::ProductOmega, 0}; }

    bool isEuclidean() const { return kind == Kind::EuclideanSup; }

    bool admits(const SparseVector& x) const {
        if (kind == Kind::ProductOmega) return true;
        const auto last = x.lastCoord();
        return !last || *last < dim;
    }

    std::string describe() const {
        return isEuclidean() ? "EuclideanSup(" + std::to_string(dim) + ")" : std::string("ProductOmega");
    }

    friend bool operator==(const AmbientSpace&, const AmbientSpace&) = default;
};

/// Basic balanced neighbourhood V(I, eps) = {x : |x_i| < eps for all i in I}.
struct BasicNbhd {
    CoordSet coords;
    Rational radius;

    BasicNbhd() : radius(1) {}
    BasicNbhd(CoordSet c, Rational r) : coords(std::move(c)), radius(std::move(r)) {
        if (radius <= 0) throw PreconditionViolation("neighbourhood radius must be positive");
    }

    friend bool operator==(const BasicNbhd&, const BasicNbhd&) = default;
};

/// max_{i in I} |x_i|, zero when the support misses I.
inline Scalar seminorm(const SparseVector& x, const CoordSet& coords) {
    std::optional<Scalar> best;
    for (const auto& [i, s] : x.entries()) {
        if (coords.count(i) == 0) continue;
        const Scalar a = abs(s);
        best = best ? max(*best, a) : a;
    }
    return best.value_or(Scalar());
}

enum class Membership { In, Out, Undecided };

inline const char* toString(Membership m) {
    switch (m) {
        case Membership::In: return "IN";
        case Membership::Out: return "OUT";
        case Membership::Undecided: return "UNDECIDED";
    }
    return "?";
}

/// Default comparison gap used by membership tests on interval data.
inline Rational defaultGap() { return dyadic(64); }

/// Strict membership: the boundary seminorm == radius is OUT.
inline Membership inNbhd(const SparseVector& x, const BasicNbhd& v, const Rational& gap = defaultGap()) {
    switch (compare(seminorm(x, v.coords), Scalar(v.radius), gap)) {
        case Ordering::Less: return Membership::In;
        case Ordering::Greater:
        case Ordering::Equal: return Membership::Out;
        case Ordering::Undecided: break;
    }
    return Membership::Undecided;
}

/// V(I, eps/k); any k members of the result sum into `u`.
inline BasicNbhd shrink(const BasicNbhd& u, unsigned k) {
    if (k == 0) throw PreconditionViolation("shrink factor must be at least 1");
    return {u.coords, u.radius / k};
}

/// Nearest integer with ties going up, so the remainder lies in [-1/2, 1/2).
/// Non-rational inputs are refined until the rounding is certified.
inline Integer nearestInteger(const Scalar& x, unsigned maxLevel = kDefaultMaxLevel) {
    const Rational half(1, 2);
    if (x.isRational()) return floorOf(x.rational() + half);
    for (unsigned level = 4;; level = std::min(2 * level, maxLevel)) {
        const Interval box = x.enclose(level);
        const Integer lo = floorOf(box.lo + half);
        if (lo == floorOf(box.hi + half)) return lo;
        if (level == maxLevel) {
            throw Undecided("value straddles a half-integer at refinement level " + std::to_string(maxLevel));
        }
    }
}

/// Distance from x to the nearest integer, as an exact or interval scalar.
inline Scalar distanceToIntegers(const Scalar& x) { return abs(x - Scalar(Rational(nearestInteger(x)))); }

/// Representative in [-1/2, 1/2)^F of a class in the torus (R/Z)^F.
struct TorusPoint {
    std::vector<Scalar> coords;
};

struct TorusReduction {
    TorusPoint point;
    std::vector<Integer> shift;  // t - shift == point entrywise
};

inline TorusReduction torusReduce(const std::vector<Scalar>& t) {
    TorusReduction out;
    out.point.coords.reserve(t.size());
    out.shift.reserve(t.size());
    for (const Scalar& s : t) {
        const Integer z = nearestInteger(s);
        out.point.coords.push_back(s - Scalar(Rational(z)));
        out.shift.push_back(z);
    }
    return out;
}

}  // namespace kalspan
