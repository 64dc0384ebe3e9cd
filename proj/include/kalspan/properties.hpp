#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kalspan/kronecker.hpp"
#include "kalspan/lattice.hpp"
#include "kalspan/linalg.hpp"
#include "kalspan/space.hpp"

namespace kalspan {

/// a_j = base + c rho^j e_{start+j}, j = 0, 1, ...
struct TailSpec {
    SparseVector base;
    Coord start = 0;
    Rational c = 1;
    Rational rho = 1;

    Rational coefficient(std::uint64_t j) const {
        Integer num, den;
        mpz_pow_ui(num.get_mpz_t(), rho.get_num_mpz_t(), j);
        mpz_pow_ui(den.get_mpz_t(), rho.get_den_mpz_t(), j);
        return c * makeRational(num, den);
    }
    Coord freshCoord(std::uint64_t j) const { return start + j; }
    SparseVector member(std::uint64_t j) const {
        SparseVector v = base;
        v.set(freshCoord(j), Scalar(coefficient(j)));
        return v;
    }
    friend bool operator==(const TailSpec&, const TailSpec&) = default;
};

/// Finite members are indexed 0..k-1; tail member j has index k + j.
struct Family {
    std::vector<SparseVector> members;
    std::optional<TailSpec> tail;

    std::size_t finiteSize() const { return members.size(); }
    bool isFinite() const { return !tail.has_value(); }
    bool hasPollutedTail() const { return tail && !tail->base.isZero(); }

    SparseVector member(std::size_t index) const {
        if (index < members.size()) return members[index];
        if (!tail) throw IndexOutOfFamily("member index " + std::to_string(index) + " outside a finite family");
        return tail->member(index - members.size());
    }

    bool isExact() const {
        for (const auto& m : members) {
            if (!m.isExact()) return false;
        }
        return !tail || tail->base.isExact();
    }

    /// Supports of the finite members and of the tail base.
    CoordSet coreCoords() const {
        CoordSet out;
        for (const auto& m : members) {
            for (Coord c : m.support()) out.insert(c);
        }
        if (tail) {
            for (Coord c : tail->base.support()) out.insert(c);
        }
        return out;
    }

    void validate() const {
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                if (members[i] == members[j]) throw PreconditionViolation("family members must be pairwise distinct");
            }
        }
        if (!tail) return;
        if (tail->c == 0 || tail->rho == 0) throw PreconditionViolation("tail scale and ratio must be nonzero");
        const CoordSet core = coreCoords();
        if (!core.empty() && *core.rbegin() >= tail->start) {
            throw PreconditionViolation("tail start must exceed every coordinate used by base and finite members");
        }
    }

    friend bool operator==(const Family&, const Family&) = default;
};

namespace detail {

inline void requireRepresentable(const Family& a, const AmbientSpace& s) {
    a.validate();
    if (a.tail && s.isEuclidean()) throw NotRepresentable("tail families need the product space");
    for (const auto& m : a.members) {
        if (!s.admits(m)) throw NotRepresentable("member outside " + s.describe());
    }
}

inline void requireExactFamily(const Family& a) {
    if (!a.isExact()) throw Undecided("deciding this property needs exact scalars");
}

/// Rational strictly between 0 and |x| for nonzero exact x.
inline Rational positiveLowerBound(const Scalar& x) {
    const Scalar m = abs(x);
    for (unsigned bits = 16;; bits *= 2) {
        const Rational lo = lowerBound(m, dyadic(bits));
        if (lo > 0) return lo;
        if (bits > kDefaultMaxLevel) throw Undecided("no positive lower bound");
    }
}

inline Rational slack() { return dyadic(48); }

/// Columns: coords, rows: members.
inline Matrix memberMatrix(const std::vector<SparseVector>& members, const std::vector<Coord>& coords) {
    Matrix m;
    for (const auto& v : members) {
        std::vector<Scalar> row;
        for (Coord c : coords) row.push_back(v.get(c));
        m.push_back(std::move(row));
    }
    return m;
}

inline std::vector<Coord> unionSupport(const std::vector<SparseVector>& members) {
    CoordSet all;
    for (const auto& v : members) {
        for (Coord c : v.support()) all.insert(c);
    }
    return {all.begin(), all.end()};
}

}  // namespace detail

/// Primitive integer z != 0 with sum z_i members_i = 0, when one exists. Decided through the
/// rational kernel: QuadExt entries split into their rational and sqrt parts.
inline std::optional<IntegerVector> exactIntegerRelation(const std::vector<SparseVector>& members) {
    const std::vector<Coord> coords = detail::unionSupport(members);
    Matrix cols;  // one row per (coord, part), one column per member
    for (Coord c : coords) {
        std::vector<Scalar> ra, rb;
        for (const auto& v : members) {
            const Scalar x = v.get(c);
            if (x.isInterval()) throw Undecided("relations need exact scalars");
            ra.emplace_back(x.isQuad() ? x.quad().a() : x.rational());
            rb.emplace_back(x.isQuad() ? x.quad().b() : Rational(0));
        }
        cols.push_back(std::move(ra));
        cols.push_back(std::move(rb));
    }
    const auto kernel = cols.empty() ? std::vector<std::vector<Scalar>>{} : nullspace(cols, members.size());
    std::vector<Scalar> v;
    if (!kernel.empty()) {
        v = kernel.front();
    } else if (cols.empty() && !members.empty()) {
        v.assign(members.size(), Scalar());  // every member is zero
        v[0] = Scalar(1);
    } else {
        return std::nullopt;
    }
    Integer den = 1;
    for (const Scalar& s : v) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), s.rational().get_den_mpz_t());
    IntegerVector z;
    Integer g = 0;
    for (const Scalar& s : v) {
        z.push_back(Rational(s.rational() * den).get_num());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), z.back().get_mpz_t());
    }
    for (Integer& zi : z) zi /= g;
    return detail::signNormalized(z);
}

// ---------------------------------------------------------------------------------------------
// absolute Cauchy summability

struct SummabilityResult {
    bool summable = true;
    std::optional<BasicNbhd> counterexample;  // span of the remaining members is unbounded there
};

inline SummabilityResult isAbsolutelyCauchySummable(const Family& a, const AmbientSpace& s) {
    detail::requireRepresentable(a, s);
    SummabilityResult out;
    if (a.hasPollutedTail()) {
        out.summable = false;
        out.counterexample = BasicNbhd({*a.tail->base.firstCoord()}, Rational(1));
    }
    return out;
}

/// The finite F with span(A \ F) inside V: members whose support meets V's coordinates
/// (every member in EuclideanSup).
inline std::vector<std::size_t> summabilitySet(const Family& a, const AmbientSpace& s, const BasicNbhd& v) {
    if (!isAbsolutelyCauchySummable(a, s).summable) throw PreconditionViolation("family is not summable");
    std::vector<std::size_t> f;
    for (std::size_t i = 0; i < a.finiteSize(); ++i) {
        if (s.isEuclidean() || !a.members[i].restrictedTo(v.coords).isZero()) f.push_back(i);
    }
    if (a.tail) {
        for (Coord c : v.coords) {
            if (c >= a.tail->start) f.push_back(a.finiteSize() + (c - a.tail->start));
        }
    }
    return f;
}

/// Re-check of an F: every member outside F vanishes on V's coordinates, so their span is in V.
inline bool verifySummabilitySet(const Family& a, const BasicNbhd& v, const std::vector<std::size_t>& f) {
    const std::set<std::size_t> inF(f.begin(), f.end());
    for (std::size_t i = 0; i < a.finiteSize(); ++i) {
        if (!inF.count(i) && !a.members[i].restrictedTo(v.coords).isZero()) return false;
    }
    if (!a.tail) return true;
    if (!a.tail->base.restrictedTo(v.coords).isZero()) return false;
    for (Coord c : v.coords) {
        if (c >= a.tail->start && !inF.count(a.finiteSize() + (c - a.tail->start))) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------------------------
// witnesses and defeaters

/// U = V(P, gamma) for a finite independent list and target W = V(I_W, delta), with
/// gamma = delta / (|R|_inf * max(1, max_a |a|_{I_W})) and R the inverse of the transposed
/// pivot minor, so z = R x_P for x = sum z_a a.
struct WitnessData {
    std::vector<SparseVector> members;
    std::vector<Coord> pivots;
    Matrix leftInverse;
    Rational normBound;    // rational upper bound on |R|_inf
    Rational memberBound;  // max(1, upper bounds of |a|_{I_W})
    BasicNbhd u;
};

inline WitnessData witnessFor(const std::vector<SparseVector>& members, const BasicNbhd& w) {
    WitnessData out;
    out.members = members;
    const std::vector<Coord> coords = detail::unionSupport(members);
    const Matrix m = detail::memberMatrix(members, coords);
    const RankResult rank = exactRank(m);
    if (rank.rank < members.size()) throw PreconditionViolation("witness schema needs independent members");
    for (std::size_t c : rank.pivots.cols) out.pivots.push_back(coords[c]);
    Matrix minorT(members.size(), std::vector<Scalar>(members.size()));
    for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t j = 0; j < out.pivots.size(); ++j) minorT[j][a] = members[a].get(out.pivots[j]);
    }
    out.leftInverse = *inverse(minorT);
    out.normBound = members.empty() ? Rational(1) : Rational(0);
    for (const auto& row : out.leftInverse) {
        Rational sum = 0;
        for (const Scalar& x : row) sum += upperBound(abs(x), detail::slack());
        out.normBound = std::max(out.normBound, sum);
    }
    out.memberBound = 1;
    for (const auto& a : members) out.memberBound = std::max(out.memberBound, upperBound(seminorm(a, w.coords), detail::slack()));
    if (members.empty()) {
        out.u = w;
    } else {
        out.u = BasicNbhd(CoordSet(out.pivots.begin(), out.pivots.end()), w.radius / (out.normBound * out.memberBound));
    }
    return out;
}

/// W -> U for a topologically independent family. Tail members matter only when their fresh
/// coordinate lies in W's coordinates; the rest vanish there and on every pivot.
struct WitnessSchema {
    Family family;

    std::vector<SparseVector> relevantMembers(const BasicNbhd& w) const {
        std::vector<SparseVector> out = family.members;
        if (family.tail) {
            for (Coord c : w.coords) {
                if (c >= family.tail->start) out.push_back(family.tail->member(c - family.tail->start));
            }
        }
        return out;
    }
    WitnessData witness(const BasicNbhd& w) const { return witnessFor(relevantMembers(w), w); }

    /// Every nonzero integer combination of the finite members has seminorm at least this on
    /// the pivot coordinates: 1 <= |z_a| <= |R|_inf |x_P|.
    Rational discretenessBound() const { return 1 / witnessFor(family.members, BasicNbhd({}, Rational(1))).normBound; }
};

/// m a - sum z_b b in U and m a outside W, both certified. Echoes every vector it uses.
struct WitnessDefeater {
    BasicNbhd w;
    BasicNbhd u;
    std::size_t a = 0;
    SparseVector aVector;
    Integer m = 1;
    std::vector<std::size_t> f;
    std::vector<SparseVector> fVectors;
    IntegerVector z;
    Scalar bound;  // upper bound on the residual's seminorm over U's coordinates
};

inline SparseVector defeaterResidual(const WitnessDefeater& d) {
    SparseVector x = Scalar(Rational(d.m)) * d.aVector;
    for (std::size_t i = 0; i < d.fVectors.size() && i < d.z.size(); ++i) {
        x -= Scalar(Rational(d.z[i])) * d.fVectors[i];
    }
    return x;
}

inline bool verifyDefeater(const WitnessDefeater& d) {
    if (d.m < 1 || d.f.size() != d.fVectors.size() || d.z.size() != d.fVectors.size()) return false;
    // F must avoid a itself, or m a - m a = 0 would defeat anything.
    if (std::find(d.fVectors.begin(), d.fVectors.end(), d.aVector) != d.fVectors.end()) return false;
    const SparseVector r = defeaterResidual(d);
    if (inNbhd(r, d.u) != Membership::In) return false;
    if (compare(seminorm(r, d.u.coords), d.bound, defaultGap()) == Ordering::Greater) return false;
    if (compare(d.bound, Scalar(d.u.radius), defaultGap()) != Ordering::Less) return false;
    return inNbhd(Scalar(Rational(d.m)) * d.aVector, d.w) == Membership::Out;
}

/// V(first support coordinate of a, |a_i0| / 2): excludes every nonzero integer multiple of a.
inline BasicNbhd defaultTarget(const SparseVector& a) {
    const auto i0 = a.firstCoord();
    if (!i0) throw PreconditionViolation("the zero vector has no excluding neighbourhood");
    return {{*i0}, detail::positiveLowerBound(a.get(*i0)) / 2};
}

struct IntegerizeBudget {
    std::uint64_t maxMultiplier = 1'000'000;
    KroneckerBudget kronecker;
};

namespace detail {

/// Members of `b` that can matter on `coords`: finite members, tail members with their fresh
/// coordinate inside, and one generic tail member outside when the base is visible there.
inline std::vector<std::size_t> visibleMembers(const Family& b, const CoordSet& coords,
                                               std::optional<std::size_t> exclude = std::nullopt) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < b.finiteSize(); ++i) {
        if (i != exclude) out.push_back(i);
    }
    if (!b.tail) return out;
    for (Coord c : coords) {
        if (c >= b.tail->start) {
            const std::size_t idx = b.finiteSize() + (c - b.tail->start);
            if (idx != exclude) out.push_back(idx);
        }
    }
    if (!b.tail->base.restrictedTo(coords).isZero()) {
        for (std::uint64_t j = 0;; ++j) {
            const std::size_t idx = b.finiteSize() + j;
            if (!coords.count(b.tail->freshCoord(j)) && idx != exclude) {
                out.push_back(idx);
                break;
            }
        }
    }
    return out;
}

/// Coefficients r with sum r_g g = a on `coords`, free variables zero.
inline std::optional<std::vector<Scalar>> solveOn(const SparseVector& a, const std::vector<SparseVector>& gens,
                                                  const CoordSet& coords) {
    Matrix m;
    std::vector<Scalar> rhs;
    for (Coord c : coords) {
        std::vector<Scalar> row;
        for (const auto& g : gens) row.push_back(g.get(c));
        m.push_back(std::move(row));
        rhs.push_back(a.get(c));
    }
    if (gens.empty()) {
        return a.restrictedTo(coords).isZero() ? std::optional<std::vector<Scalar>>(std::vector<Scalar>{})
                                               : std::nullopt;
    }
    if (m.empty()) return std::vector<Scalar>(gens.size());
    return solve(m, rhs);
}

}  // namespace detail

/// Runs the multiplier construction: exact solve on U's coordinates for a = sum r_b b, then
/// an integer m with m r_b close to integers z_b so that m a - sum z_b b lands in U while
/// m a stays outside W. Indices in the result refer to `b`.
inline WitnessDefeater integerize(const SparseVector& a, const Family& b, const BasicNbhd& u, const BasicNbhd& w,
                                  const IntegerizeBudget& budget = {}) {
    if (!a.isExact() || !b.isExact()) throw Undecided("integerize needs exact scalars");
    b.validate();
    const BasicNbhd v = shrink(u, 3);
    std::vector<std::size_t> idx = detail::visibleMembers(b, u.coords);
    std::vector<SparseVector> gens;
    for (std::size_t i : idx) gens.push_back(b.member(i));
    const auto r = detail::solveOn(a, gens, u.coords);
    if (!r) throw NotInClosure("a is not in the span of the family on U's coordinates");

    // Drop zero coefficients; they contribute nothing.
    std::vector<std::size_t> fIdx;
    std::vector<SparseVector> fVec;
    std::vector<Scalar> coeff;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if ((*r)[i].isZero()) continue;
        fIdx.push_back(idx[i]);
        fVec.push_back(gens[i]);
        coeff.push_back((*r)[i]);
    }

    auto attempt = [&](const Integer& m, const IntegerVector& z) -> std::optional<WitnessDefeater> {
        WitnessDefeater d{w, u, 0, a, m, fIdx, fVec, z, Scalar()};
        const SparseVector res = defeaterResidual(d);
        if (inNbhd(res, u) != Membership::In) return std::nullopt;
        if (inNbhd(Scalar(Rational(m)) * a, w) != Membership::Out) return std::nullopt;
        d.bound = seminorm(res, u.coords);
        if (!d.bound.isExact()) d.bound = Scalar(upperBound(d.bound, u.radius / 64));
        return d;
    };
    auto rounded = [&](const Integer& m) {
        IntegerVector z;
        for (const Scalar& c : coeff) z.push_back(nearestInteger(Scalar(Rational(m)) * c));
        return z;
    };

    const bool rational = std::all_of(coeff.begin(), coeff.end(), [](const Scalar& c) { return c.isRational(); });
    if (rational) {
        Integer q = 1;
        for (const Scalar& c : coeff) mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), c.rational().get_den_mpz_t());
        for (Integer m = q; m <= Integer(std::to_string(budget.maxMultiplier)); m += q) {
            if (auto d = attempt(m, rounded(m))) return *d;
        }
        throw BudgetExceeded("every multiple of the common denominator stays inside W");
    }

    // Coefficient errors below eta keep the residual inside V: |sum (m r_b - z_b) b|_I < eta sum |b|_I.
    Rational total = 0;
    for (const auto& g : fVec) total += upperBound(seminorm(g, u.coords), detail::slack());
    Rational eta = total > 0 ? v.radius / total : Rational(1, 4);
    eta = std::min(eta, Rational(1, 4));
    Integer bound = Integer(std::to_string(budget.maxMultiplier));
    std::optional<Integer> construction;
    // Exact coefficients share one radicand: with D clearing every denominator, D r_b = P_b + K_b sqrt(n)
    // in integers, so one approximation of sqrt(n) to eta / max|K_b| serves every b at m = D m'.
    Integer den = 1, kMax = 0;
    long radicand = 0;
    for (const Scalar& c : coeff) {
        const QuadExt q = c.isQuad() ? c.quad() : QuadExt(c.rational(), 0, 2);
        if (c.isQuad()) radicand = q.radicand();
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.a().get_den_mpz_t());
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.b().get_den_mpz_t());
    }
    for (const Scalar& c : coeff) {
        if (c.isQuad()) kMax = std::max(kMax, Integer(abs(Rational(Rational(c.quad().b() * den)).get_num())));
    }
    if (radicand > 0 && kMax > 0) {
        construction = sqrtConvergentMultiplier(radicand, eta / Rational(kMax)).m * den;
    } else {
        // Unreachable for exact inputs, kept for completeness: the cluster pipeline on the coefficients.
        const std::vector<std::vector<Scalar>> samples(4, coeff);
        try {
            construction = sequenceMultiplier(samples, eta, samples.size(), budget.kronecker).m;
        } catch (const InsufficientQuorum&) {
        } catch (const BudgetExceeded&) {
        }
    }
    // Scan small multipliers for the least one that works, then try the construction itself.
    const Integer smallScan = std::min(bound, construction ? std::min(*construction, Integer(10000)) : bound);
    for (Integer m = 1; m <= smallScan; ++m) {
        if (auto d = attempt(m, rounded(m))) return *d;
    }
    if (construction) {
        if (auto d = attempt(*construction, rounded(*construction))) return *d;
    }
    throw BudgetExceeded("no multiplier up to " + bound.get_str() + " defeats U");
}

/// For a family that is not topologically independent: a fixed W and, for any queried U, a
/// defeater showing U is no W-witness.
struct DefeatGenerator {
    enum class Kind { ExactRelation, Approximation, PollutedTail, ZeroMember };

    Family family;
    Kind kind = Kind::ExactRelation;
    std::size_t a = 0;
    BasicNbhd w;
    IntegerVector relation;  // over the finite members, ExactRelation only

    WitnessDefeater defeat(const BasicNbhd& u, const IntegerizeBudget& budget = {}) const {
        switch (kind) {
            case Kind::ZeroMember:
                throw PreconditionViolation("a zero member is excluded by definition; no neighbourhood avoids 0");
            case Kind::ExactRelation: {
                WitnessDefeater d{w, u, a, family.members[a], relation[a], {}, {}, {}, Scalar()};
                for (std::size_t i = 0; i < relation.size(); ++i) {
                    if (i == a || relation[i] == 0) continue;
                    d.f.push_back(i);
                    d.fVectors.push_back(family.members[i]);
                    d.z.push_back(-relation[i]);
                }
                return d;
            }
            case Kind::PollutedTail: {
                // Two tail members with fresh coordinates outside U: their difference vanishes on U.
                std::vector<std::uint64_t> js;
                for (std::uint64_t j = 0; js.size() < 2; ++j) {
                    if (!u.coords.count(family.tail->freshCoord(j))) js.push_back(j);
                }
                const std::size_t k = family.finiteSize();
                return WitnessDefeater{w, u, k + js[0], family.tail->member(js[0]), Integer(1), {k + js[1]},
                                       {family.tail->member(js[1])}, {Integer(1)}, Scalar()};
            }
            case Kind::Approximation: {
                Family rest = family;
                rest.members.erase(rest.members.begin() + static_cast<std::ptrdiff_t>(a));
                WitnessDefeater d = integerize(family.members[a], rest, u, w, budget);
                d.a = a;
                for (std::size_t& i : d.f) {
                    if (i >= a) ++i;
                }
                return d;
            }
        }
        throw Inconsistency("unknown defeat kind");
    }
};

inline const char* toString(DefeatGenerator::Kind k) {
    switch (k) {
        case DefeatGenerator::Kind::ExactRelation: return "exact-relation";
        case DefeatGenerator::Kind::Approximation: return "approximation";
        case DefeatGenerator::Kind::PollutedTail: return "polluted-tail";
        case DefeatGenerator::Kind::ZeroMember: return "zero-member";
    }
    return "?";
}

struct IndependenceResult {
    bool independent = false;
    std::optional<WitnessSchema> schema;
    std::optional<DefeatGenerator> defeat;
};

inline IndependenceResult isTopologicallyIndependent(const Family& a, const AmbientSpace& s) {
    detail::requireRepresentable(a, s);
    detail::requireExactFamily(a);
    IndependenceResult out;
    for (std::size_t i = 0; i < a.finiteSize(); ++i) {
        if (a.members[i].isZero()) {
            out.defeat = DefeatGenerator{a, DefeatGenerator::Kind::ZeroMember, i, BasicNbhd(), {}};
            return out;
        }
    }
    if (a.hasPollutedTail()) {
        const Coord i0 = *a.tail->base.firstCoord();
        const BasicNbhd w({i0}, detail::positiveLowerBound(a.tail->base.get(i0)) / 2);
        out.defeat = DefeatGenerator{a, DefeatGenerator::Kind::PollutedTail, a.finiteSize(), w, {}};
        return out;
    }
    // Zero-base tail members sit on fresh coordinates, so independence is the core's.
    const std::vector<Coord> coords = detail::unionSupport(a.members);
    const RankResult rank = exactRank(detail::memberMatrix(a.members, coords));
    if (rank.rank == a.finiteSize()) {
        out.independent = true;
        out.schema = WitnessSchema{a};
        return out;
    }
    if (auto z = exactIntegerRelation(a.members)) {
        std::size_t first = 0;
        while ((*z)[first] == 0) ++first;
        out.defeat = DefeatGenerator{a, DefeatGenerator::Kind::ExactRelation, first,
                                     defaultTarget(a.members[first]), *z};
        return out;
    }
    // Dependent over the field but not over Q: approximate with integer multiples.
    Matrix columns = transpose(detail::memberMatrix(a.members, coords));
    const auto kernel = nullspace(columns, a.finiteSize());
    std::size_t first = 0;
    while (kernel.front()[first].isZero()) ++first;
    out.defeat = DefeatGenerator{a, DefeatGenerator::Kind::Approximation, first, defaultTarget(a.members[first]), {}};
    return out;
}

// ---------------------------------------------------------------------------------------------
// semi-basic

/// Functional y on the saturated coordinates vanishing on every other generator, y . a != 0.
struct SeparationCert {
    std::size_t a = 0;
    SparseVector aVector;
    CoordSet coords;
    std::vector<std::size_t> generatorIndices;
    std::vector<SparseVector> generators;
    std::map<Coord, Scalar> functional;
};

inline bool verifySeparation(const SeparationCert& c) {
    auto apply = [&](const SparseVector& x) {
        Scalar s;
        for (const auto& [coord, y] : c.functional) {
            if (!c.coords.count(coord)) return std::optional<Scalar>();
            s = s + y * x.get(coord);
        }
        return std::optional<Scalar>(s);
    };
    for (const auto& g : c.generators) {
        const auto v = apply(g);
        if (!v || !v->isZero()) return false;
    }
    const auto v = apply(c.aVector);
    return v && !v->isZero();
}

/// s in span(A \ {a}) with seminorm(a - s, I) < 1/n; the construction is exact, so the
/// seminorm is 0.
struct ClosureApproximation {
    SparseVector s;
    std::map<std::size_t, Scalar> coefficients;
};

struct SemiBasicResult {
    bool semiBasic = true;
    std::vector<SeparationCert> certs;  // finite members, then tail representatives
    std::optional<std::size_t> offending;
};

namespace detail {

/// I*: every coordinate where a or a non-fresh generator can be nonzero.
inline CoordSet saturatedCoords(const Family& f, const SparseVector& a, const AmbientSpace& s) {
    CoordSet out;
    if (s.isEuclidean()) {
        for (Coord c = 0; c < s.dim; ++c) out.insert(c);
        return out;
    }
    out = f.coreCoords();
    for (Coord c : a.support()) out.insert(c);
    return out;
}

inline std::vector<std::size_t> tailRepresentatives(const Family& f) {
    std::vector<std::size_t> out;
    if (f.tail) {
        for (std::size_t j = 0; j < 3; ++j) out.push_back(f.finiteSize() + j);
    }
    return out;
}

}  // namespace detail

inline std::optional<ClosureApproximation> closureApproximation(const Family& f, std::size_t index,
                                                                const CoordSet& coords) {
    const SparseVector a = f.member(index);
    const std::vector<std::size_t> idx = detail::visibleMembers(f, coords, index);
    std::vector<SparseVector> gens;
    for (std::size_t i : idx) gens.push_back(f.member(i));
    const auto r = detail::solveOn(a, gens, coords);
    if (!r) return std::nullopt;
    ClosureApproximation out;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if ((*r)[i].isZero()) continue;
        out.coefficients.emplace(idx[i], (*r)[i]);
        out.s += (*r)[i] * gens[i];
    }
    return out;
}

/// Approximation schedule entry for a member in the closure of the others: on any finite I,
/// solving at I united with I* gives an exact combination.
inline ClosureApproximation approximationAt(const Family& f, const AmbientSpace& s, std::size_t index,
                                            const CoordSet& coords, unsigned n) {
    if (n == 0) throw PreconditionViolation("schedule index must be positive");
    CoordSet all = detail::saturatedCoords(f, f.member(index), s);
    all.insert(coords.begin(), coords.end());
    auto out = closureApproximation(f, index, all);
    if (!out) throw NotInClosure("member is not in the closed span of the others");
    return *out;
}

inline SemiBasicResult isSemiBasic(const Family& f, const AmbientSpace& s) {
    detail::requireRepresentable(f, s);
    detail::requireExactFamily(f);
    SemiBasicResult out;
    std::vector<std::size_t> toCheck(f.finiteSize());
    std::iota(toCheck.begin(), toCheck.end(), std::size_t{0});
    for (std::size_t i : detail::tailRepresentatives(f)) toCheck.push_back(i);

    for (std::size_t index : toCheck) {
        const SparseVector a = f.member(index);
        const CoordSet star = detail::saturatedCoords(f, a, s);
        if (closureApproximation(f, index, star)) {
            out.semiBasic = false;
            out.offending = index;
            out.certs.clear();
            return out;
        }
        SeparationCert cert;
        cert.a = index;
        cert.aVector = a.restrictedTo(star);
        cert.coords = star;
        cert.generatorIndices = detail::visibleMembers(f, star, index);
        for (std::size_t g : cert.generatorIndices) cert.generators.push_back(f.member(g).restrictedTo(star));
        const std::vector<Coord> cols(star.begin(), star.end());
        Matrix rows = detail::memberMatrix(cert.generators, cols);
        std::vector<std::vector<Scalar>> kernel;
        if (rows.empty()) {
            for (std::size_t c = 0; c < cols.size(); ++c) {
                std::vector<Scalar> e(cols.size());
                e[c] = Scalar(1);
                kernel.push_back(std::move(e));
            }
        } else {
            kernel = nullspace(rows, cols.size());
        }
        bool found = false;
        for (const auto& y : kernel) {
            Scalar ya;
            for (std::size_t c = 0; c < cols.size(); ++c) ya = ya + y[c] * a.get(cols[c]);
            if (ya.isZero()) continue;
            for (std::size_t c = 0; c < cols.size(); ++c) {
                if (!y[c].isZero()) cert.functional.emplace(cols[c], y[c]);
            }
            found = true;
            break;
        }
        if (!found) throw Inconsistency("member outside the span but no separating functional");
        out.certs.push_back(std::move(cert));
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// theorem instances

enum class Verdict { Yes, No, Inconclusive };

inline const char* toString(Verdict v) {
    switch (v) {
        case Verdict::Yes: return "true";
        case Verdict::No: return "false";
        case Verdict::Inconclusive: return "undecided";
    }
    return "?";
}

inline Verdict verdictOf(bool b) { return b ? Verdict::Yes : Verdict::No; }

struct InstanceReport {
    std::string label;
    Verdict summable = Verdict::Inconclusive;
    Verdict independent = Verdict::Inconclusive;
    Verdict semiBasic = Verdict::Inconclusive;
    bool violation = false;  // summable and independent but not semi-basic
    std::optional<std::size_t> offending;
    std::optional<BasicNbhd> counterexample;
};

/// Evaluates the three properties and checks that summable + independent implies semi-basic.
inline InstanceReport checkTheoremInstance(const Family& f, const AmbientSpace& s, std::string label = {}) {
    InstanceReport r;
    r.label = std::move(label);
    try {
        const SummabilityResult acs = isAbsolutelyCauchySummable(f, s);
        r.summable = verdictOf(acs.summable);
        r.counterexample = acs.counterexample;
        r.independent = verdictOf(isTopologicallyIndependent(f, s).independent);
        const SemiBasicResult sb = isSemiBasic(f, s);
        r.semiBasic = verdictOf(sb.semiBasic);
        r.offending = sb.offending;
    } catch (const Undecided&) {
        return r;
    }
    r.violation = r.summable == Verdict::Yes && r.independent == Verdict::Yes && r.semiBasic == Verdict::No;
    return r;
}

struct Profile {
    enum class Kind { RationalFinite, QuadFinite, UnitTail, PollutedTail, PlantedDependence };
    Kind kind = Kind::RationalFinite;
    std::size_t d = 3;
    std::size_t k = 3;
    long radicand = 2;

    static Profile rationalFinite(std::size_t d, std::size_t k) { return {Kind::RationalFinite, d, k, 2}; }
    static Profile quadFinite(std::size_t d, std::size_t k, long n) { return {Kind::QuadFinite, d, k, n}; }
    static Profile unitTail(std::size_t core = 0) { return {Kind::UnitTail, 2, core, 2}; }
    static Profile pollutedTail(std::size_t core = 1) { return {Kind::PollutedTail, 2, core, 2}; }
    static Profile plantedDependence(std::size_t d, std::size_t k) { return {Kind::PlantedDependence, d, k, 2}; }
};

inline const char* toString(Profile::Kind k) {
    switch (k) {
        case Profile::Kind::RationalFinite: return "rationalFinite";
        case Profile::Kind::QuadFinite: return "quadFinite";
        case Profile::Kind::UnitTail: return "unitTail";
        case Profile::Kind::PollutedTail: return "pollutedTail";
        case Profile::Kind::PlantedDependence: return "plantedDependence";
    }
    return "?";
}

struct Instance {
    Family family;
    AmbientSpace space;
};

namespace detail {

// Modulo draws keep the stream identical across standard libraries.
class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}
    long integer(long lo, long hi) { return lo + static_cast<long>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    Rational rational(long num = 5, long den = 4) { return makeRational(integer(-num, num), integer(1, den)); }
    Rational nonzero(long num = 5, long den = 4) {
        for (;;) {
            const Rational q = rational(num, den);
            if (q != 0) return q;
        }
    }
    bool oneIn(long n) { return integer(0, n - 1) == 0; }

private:
    std::mt19937_64 rng_;
};

inline SparseVector randomVector(Draw& g, std::size_t d, std::optional<long> radicand) {
    for (;;) {
        SparseVector v;
        for (Coord c = 0; c < d; ++c) {
            if (g.oneIn(3)) continue;
            if (radicand && !g.oneIn(3)) {
                v.set(c, Scalar(QuadExt(g.rational(3, 3), g.rational(3, 3), *radicand)));
            } else {
                v.set(c, Scalar(g.rational()));
            }
        }
        if (!v.isZero()) return v;
    }
}

inline std::vector<SparseVector> distinctVectors(Draw& g, std::size_t d, std::size_t k, std::optional<long> radicand) {
    std::vector<SparseVector> out;
    for (unsigned tries = 0; out.size() < k; ++tries) {
        SparseVector v = randomVector(g, d, radicand);
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
        if (tries > 10000) throw Inconsistency("could not draw distinct vectors");
    }
    return out;
}

}  // namespace detail

inline Instance generateInstance(std::uint64_t seed, const Profile& p) {
    if (p.d == 0 || p.d > 8 || p.k > 8) throw PreconditionViolation("profile needs 1 <= d <= 8 and k <= 8");
    detail::Draw g(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(p.kind) + 1);
    Instance out{{}, AmbientSpace::euclidean(p.d)};
    switch (p.kind) {
        case Profile::Kind::RationalFinite:
            out.family.members = detail::distinctVectors(g, p.d, p.k, std::nullopt);
            break;
        case Profile::Kind::QuadFinite:
            if (!isSquareFree(p.radicand) || p.radicand < 2) throw PreconditionViolation("radicand must be square-free");
            out.family.members = detail::distinctVectors(g, p.d, p.k, p.radicand);
            break;
        case Profile::Kind::UnitTail:
            out.space = AmbientSpace::product();
            if (p.k == 0) {
                out.family.tail = TailSpec{{}, 0, Rational(1), Rational(1)};
            } else {
                out.family.members = detail::distinctVectors(g, p.d, p.k, std::nullopt);
                out.family.tail = TailSpec{{}, p.d, g.nonzero(), g.nonzero(3, 3)};
            }
            break;
        case Profile::Kind::PollutedTail:
            out.space = AmbientSpace::product();
            out.family.members = detail::distinctVectors(g, p.d, p.k, std::nullopt);
            out.family.tail = TailSpec{detail::randomVector(g, p.d, std::nullopt), p.d, g.nonzero(), g.nonzero(3, 3)};
            break;
        case Profile::Kind::PlantedDependence: {
            if (p.k < 2) throw PreconditionViolation("planted dependence needs k >= 2");
            for (;;) {
                std::vector<SparseVector> v = detail::distinctVectors(g, p.d, p.k - 1, std::nullopt);
                SparseVector planted;
                for (const auto& x : v) {
                    const long c = g.integer(-2, 2);
                    if (c != 0) planted += Scalar(c) * x;
                }
                if (planted.isZero() || std::find(v.begin(), v.end(), planted) != v.end()) continue;
                const auto pos = static_cast<std::ptrdiff_t>(g.integer(0, static_cast<long>(v.size())));
                v.insert(v.begin() + pos, planted);
                out.family.members = std::move(v);
                break;
            }
            break;
        }
    }
    return out;
}

/// Profile for the i-th instance of a sweep: kinds round-robin, sizes drawn from the seed.
inline Profile sweepProfile(std::uint64_t seed, std::size_t i) {
    detail::Draw g(seed * 1000003ULL + i);
    const auto d = static_cast<std::size_t>(g.integer(1, 4));
    const auto k = static_cast<std::size_t>(g.integer(1, 4));
    const long radicands[] = {2, 3, 5};
    switch (i % 5) {
        case 0: return Profile::rationalFinite(d, k);
        case 1: return Profile::quadFinite(d, k, radicands[g.integer(0, 2)]);
        case 2: return Profile::unitTail(g.oneIn(3) ? 0 : k);
        case 3: return Profile::pollutedTail(k - 1);
        default: return Profile::plantedDependence(d, std::max<std::size_t>(k, 2));
    }
}

struct SweepReport {
    std::uint64_t seed = 0;
    std::vector<InstanceReport> instances;
    std::size_t violations = 0;
    std::size_t inconclusive = 0;
};

inline SweepReport theoremSweep(std::uint64_t seed, std::size_t count) {
    SweepReport out;
    out.seed = seed;
    for (std::size_t i = 0; i < count; ++i) {
        const Profile p = sweepProfile(seed, i);
        const Instance inst = generateInstance(seed + i, p);
        InstanceReport r = checkTheoremInstance(inst.family, inst.space,
                                                std::string(toString(p.kind)) + "#" + std::to_string(seed + i));
        if (r.violation) ++out.violations;
        if (r.semiBasic == Verdict::Inconclusive) ++out.inconclusive;
        out.instances.push_back(std::move(r));
    }
    return out;
}

}  // namespace kalspan
