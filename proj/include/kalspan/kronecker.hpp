#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kalspan/lattice.hpp"
#include "kalspan/space.hpp"

namespace kalspan {

enum class MultiplierMethod { Exhaustive, Dirichlet, Lll, CompactOrder, ContinuedFraction };

inline const char* toString(MultiplierMethod m) {
    switch (m) {
        case MultiplierMethod::Exhaustive: return "exhaustive";
        case MultiplierMethod::Dirichlet: return "dirichlet";
        case MultiplierMethod::Lll: return "lll";
        case MultiplierMethod::CompactOrder: return "compact-order";
        case MultiplierMethod::ContinuedFraction: return "continued-fraction";
    }
    return "?";
}

/// m >= 1 and integers z with max_i |m t_i - z_i| <= bound < eps, all certified.
struct MultiplierCert {
    std::vector<Scalar> t;
    Rational eps;
    Integer m;
    IntegerVector z;
    Scalar bound;  // exact distance for exact t, rational upper bound otherwise
    MultiplierMethod method = MultiplierMethod::Exhaustive;
};

struct KroneckerBudget {
    std::uint64_t scanLimit = 1'000'000;  // largest multiplier any scan may try
    unsigned refineBits = 256;            // finest comparison gap is 2^-refineBits
    unsigned deltaSteps = 24;             // cluster radius halvings in the sequence pipeline
    std::uint64_t snapDenominators = 512; // largest denominator tried when snapping a cluster
};

namespace detail {

struct Closeness {
    Ordering order = Ordering::Undecided;  // of max distance against eps
    IntegerVector z;
    Scalar distance;
};

/// max_i |m t_i - round(m t_i)| compared with eps, refining interval data up to the budget.
inline Closeness closeness(const std::vector<Scalar>& t, const Integer& m, const Rational& eps,
                           const KroneckerBudget& budget) {
    Closeness out;
    out.z.reserve(t.size());
    std::optional<Scalar> worst;
    const Scalar mm{Rational(m)};
    for (const Scalar& ti : t) {
        const Scalar x = ti.isRational() ? Scalar(ti.rational() * m) : mm * ti;
        const Integer zi = nearestInteger(x);
        out.z.push_back(zi);
        const Scalar d = abs(x - Scalar(Rational(zi)));
        worst = worst ? max(*worst, d) : d;
    }
    out.distance = worst.value_or(Scalar());
    for (unsigned bits = 16;; bits = std::min(2 * bits, budget.refineBits)) {
        out.order = compare(out.distance, Scalar(eps), eps * dyadic(bits));
        if (out.order != Ordering::Undecided || bits == budget.refineBits) break;
    }
    return out;
}

/// Exact distance when available, else a rational upper bound still below eps.
inline Scalar certifiedBound(const Scalar& distance, const Rational& eps) {
    if (distance.isExact()) return distance;
    for (Rational w = eps / 4;; w /= 16) {
        const Rational hi = distance.refine(w).hi;
        if (hi < eps) return Scalar(hi);
    }
}

inline void requireEps(const Rational& eps) {
    if (eps <= 0 || eps >= Rational(1, 2)) throw PreconditionViolation("eps must lie in (0, 1/2)");
}

inline Integer dirichletBound(const Rational& eps, std::size_t dims) {
    Integer n = ceilOf(1 / eps);
    Integer out = 1;
    for (std::size_t i = 0; i < dims; ++i) out *= n;
    return out;
}

/// Minimal m in [1, limit] with certified closeness; Undecided at any m aborts the scan.
inline std::optional<MultiplierCert> scanMinimal(const std::vector<Scalar>& t, const Rational& eps,
                                                 const Integer& limit, MultiplierMethod method,
                                                 const KroneckerBudget& budget) {
    for (Integer m = 1; m <= limit; ++m) {
        Closeness c = closeness(t, m, eps, budget);
        if (c.order == Ordering::Undecided) {
            throw Undecided("closeness of multiplier " + m.get_str() + " not decidable within the refinement budget");
        }
        if (c.order == Ordering::Less) {
            return MultiplierCert{t, eps, m, std::move(c.z), certifiedBound(c.distance, eps), method};
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Re-checks a certificate from its own fields: m >= 1, and every |m t_i - z_i| is certified
/// below eps and not above the recorded bound.
inline bool verifyMultiplier(const MultiplierCert& cert, const KroneckerBudget& budget = {}) {
    if (cert.m < 1 || cert.z.size() != cert.t.size()) return false;
    if (cert.eps <= 0) return false;
    if (compare(cert.bound, Scalar(cert.eps), cert.eps * dyadic(budget.refineBits)) != Ordering::Less) return false;
    const Scalar mm{Rational(cert.m)};
    for (std::size_t i = 0; i < cert.t.size(); ++i) {
        const Scalar d = abs(mm * cert.t[i] - Scalar(Rational(cert.z[i])));
        if (compare(d, Scalar(cert.eps), cert.eps * dyadic(budget.refineBits)) != Ordering::Less) return false;
        if (compare(d, cert.bound, cert.eps * dyadic(budget.refineBits)) == Ordering::Greater) return false;
    }
    return true;
}

/// Minimal positive m with dist_inf(m t, Z^F) < eps, found by scanning m = 1, 2, ...; a hit is
/// guaranteed by pigeonhole before ceil(1/eps)^|F|.
inline MultiplierCert dirichletMultiplier(const std::vector<Scalar>& t, const Rational& eps,
                                          const KroneckerBudget& budget = {}) {
    detail::requireEps(eps);
    if (t.size() > 4) throw PreconditionViolation("dirichletMultiplier supports at most 4 coordinates");
    const Integer guaranteed = detail::dirichletBound(eps, t.size());
    if (guaranteed > Integer(std::to_string(budget.scanLimit))) {
        throw BudgetExceeded("Dirichlet bound " + guaranteed.get_str() + " exceeds the scan limit " +
                             std::to_string(budget.scanLimit));
    }
    auto cert = detail::scanMinimal(t, eps, guaranteed, MultiplierMethod::Dirichlet, budget);
    if (!cert) throw Inconsistency("no multiplier below the Dirichlet bound");
    return *cert;
}

/// First convergent denominator q of sqrt(n) with |q sqrt(n) - p| < eps. Convergents are the
/// best approximations, and they grow geometrically, so this reaches tiny eps in few steps.
inline MultiplierCert sqrtConvergentMultiplier(long n, const Rational& eps, std::size_t maxTerms = 10000) {
    detail::requireEps(eps);
    if (n < 2) throw PreconditionViolation("sqrtConvergentMultiplier needs n >= 2");
    const Scalar root = Scalar::sqrtOf(n);
    if (root.isRational()) throw PreconditionViolation("sqrt(n) is rational");
    Integer a0;
    mpz_sqrt(a0.get_mpz_t(), Integer(n).get_mpz_t());
    Integer m = 0, d = 1, a = a0;
    Integer hPrev = 1, h = a0, qPrev = 0, q = 1;
    for (std::size_t k = 0; k < maxTerms; ++k) {
        const Scalar dist = abs(root.scaledBy(Rational(q)) - Scalar(Rational(h)));
        if (compare(dist, Scalar(eps), eps * dyadic(64)) == Ordering::Less) {
            return MultiplierCert{{root}, eps, q, {h}, dist, MultiplierMethod::ContinuedFraction};
        }
        m = d * a - m;
        d = (Integer(n) - m * m) / d;
        a = (a0 + m) / d;
        const Integer hNext = a * h + hPrev, qNext = a * q + qPrev;
        hPrev = h;
        h = hNext;
        qPrev = q;
        q = qNext;
    }
    throw BudgetExceeded("no convergent within " + std::to_string(maxTerms) + " terms");
}

/// Fast path: reduce the lattice spanned by (1, C t_1, ..., C t_k) and (0, .., C, ..) with
/// C = mMax / eps, read multipliers off the first coordinate of short vectors, and keep the
/// smallest one that verifies. nullopt means no verified candidate; fall back to scanning.
inline std::optional<MultiplierCert> lllMultiplier(const std::vector<Scalar>& t, const Rational& eps,
                                                   const Integer& mMax, const KroneckerBudget& budget = {}) {
    if (eps <= 0) throw PreconditionViolation("eps must be positive");
    if (mMax < 1) throw PreconditionViolation("mMax must be at least 1");
    const std::size_t k = t.size();
    if (k == 0) return MultiplierCert{t, eps, Integer(1), {}, Scalar(), MultiplierMethod::Lll};

    const Rational scale = Rational(mMax) / eps;
    const Rational width = eps / Rational(8) / Rational(mMax);
    LatticeBasis lattice;
    RationalVector first(k + 1);
    first[0] = 1;
    for (std::size_t i = 0; i < k; ++i) {
        const Interval box = t[i].refine(width);
        first[i + 1] = scale * (box.lo + box.hi) / 2;
    }
    lattice.rows.push_back(first);
    for (std::size_t i = 0; i < k; ++i) {
        RationalVector row(k + 1);
        row[i + 1] = scale;
        lattice.rows.push_back(row);
    }
    const LatticeBasis reduced = lllReduce(lattice, Rational(99, 100));

    std::vector<Integer> multipliers;
    auto consider = [&](const Rational& firstCoord) {
        const Integer m = abs(firstCoord.get_num());
        if (m >= 1 && m <= mMax) multipliers.push_back(m);
    };
    for (std::size_t i = 0; i < reduced.rank(); ++i) {
        consider(reduced.rows[i][0]);
        for (std::size_t j = i + 1; j < reduced.rank(); ++j) {
            consider(reduced.rows[i][0] + reduced.rows[j][0]);
            consider(reduced.rows[i][0] - reduced.rows[j][0]);
        }
    }
    std::sort(multipliers.begin(), multipliers.end());
    multipliers.erase(std::unique(multipliers.begin(), multipliers.end()), multipliers.end());
    for (const Integer& m : multipliers) {
        detail::Closeness c = detail::closeness(t, m, eps, budget);
        if (c.order == Ordering::Less) {
            return MultiplierCert{t, eps, m, std::move(c.z), detail::certifiedBound(c.distance, eps),
                                  MultiplierMethod::Lll};
        }
    }
    return std::nullopt;
}

/// Multiplier driving a torus point into the eps-box around 0. Rational points have finite
/// order q (the lcm of the denominators) and m = q lands exactly on 0; otherwise <p> is dense
/// enough and the minimal m is found by scanning.
inline MultiplierCert compactMultiplier(const TorusPoint& p, const Rational& eps, const KroneckerBudget& budget = {}) {
    detail::requireEps(eps);
    const bool allRational =
        std::all_of(p.coords.begin(), p.coords.end(), [](const Scalar& s) { return s.isRational(); });
    if (allRational) {
        Integer order = 1;
        for (const Scalar& s : p.coords) {
            mpz_lcm(order.get_mpz_t(), order.get_mpz_t(), s.rational().get_den_mpz_t());
        }
        IntegerVector z;
        for (const Scalar& s : p.coords) z.push_back(Rational(s.rational() * order).get_num());
        return MultiplierCert{p.coords, eps, order, std::move(z), Scalar(), MultiplierMethod::CompactOrder};
    }
    auto cert = detail::scanMinimal(p.coords, eps, Integer(std::to_string(budget.scanLimit)),
                                    MultiplierMethod::Exhaustive, budget);
    if (!cert) {
        throw BudgetExceeded("no multiplier up to " + std::to_string(budget.scanLimit));
    }
    return *cert;
}

struct IndexCert {
    IntegerVector z;
    Scalar bound;
};

/// One multiplier m that works, with certified integer tuples, for every listed sample index.
struct SequenceMultiplierCert {
    std::vector<std::vector<Scalar>> samples;
    Rational eps;
    std::size_t quorum = 0;
    Integer m;
    std::map<std::size_t, IndexCert> perIndex;
};

inline bool verifySequenceMultiplier(const SequenceMultiplierCert& cert, const KroneckerBudget& budget = {}) {
    if (cert.perIndex.size() < cert.quorum || cert.m < 1) return false;
    for (const auto& [n, entry] : cert.perIndex) {
        if (n >= cert.samples.size()) return false;
        const MultiplierCert single{cert.samples[n], cert.eps, cert.m, entry.z, entry.bound,
                                    MultiplierMethod::Exhaustive};
        if (!verifyMultiplier(single, budget)) return false;
    }
    return true;
}

namespace detail {

/// Torus distance max_i ||x_i - y_i|| between rational approximations.
inline Rational torusDistance(const RationalVector& x, const RationalVector& y) {
    Rational worst = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Rational d = x[i] - y[i];
        const Rational r = abs(d - Rational(roundHalfUp(d)));
        if (r > worst) worst = r;
    }
    return worst;
}

/// Rational torus point p/q of smallest denominator whose delta-ball holds at least `quorum` of
/// the approximations; candidates for each q are the roundings of the samples themselves.
/// Stands in for the limit of the cluster.
inline std::optional<TorusPoint> snapToRational(const std::vector<RationalVector>& approx, const Rational& delta,
                                                std::size_t quorum, const KroneckerBudget& budget) {
    for (std::uint64_t q = 1; q <= budget.snapDenominators; ++q) {
        std::set<IntegerVector> seen;
        for (const RationalVector& c : approx) {
            IntegerVector num;
            for (const Rational& ci : c) num.push_back(roundHalfUp(ci * q));
            if (!seen.insert(num).second) continue;
            RationalVector candidate;
            for (const Integer& p : num) candidate.push_back(makeRational(p, Integer(std::to_string(q))));
            std::size_t count = 0;
            for (const RationalVector& other : approx) {
                if (torusDistance(candidate, other) < delta) ++count;
            }
            if (count < quorum) continue;
            std::vector<Scalar> coords(candidate.begin(), candidate.end());
            return torusReduce(coords).point;
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Constructive form of the "infinitely many n" approximation: find one m and integer tuples
/// z_n with max|m t_n - z_n| < eps for at least `quorum` of the samples.
///
/// Steps: reduce every sample onto the torus; pick the sample with the most neighbours within
/// delta (ties to the lowest index), halving delta from eps/2; run compactMultiplier with radius
/// eps/2 on that cluster centre and on the simplest rational point carrying a quorum within
/// delta; keep the first m whose certified index set reaches the quorum.
inline SequenceMultiplierCert sequenceMultiplier(const std::vector<std::vector<Scalar>>& samples, const Rational& eps,
                                                 std::size_t quorum, const KroneckerBudget& budget = {}) {
    detail::requireEps(eps);
    if (quorum == 0 || quorum > samples.size()) {
        throw PreconditionViolation("quorum must lie in [1, number of samples]");
    }
    const std::size_t dims = samples.front().size();
    for (const auto& s : samples) {
        if (s.size() != dims) throw PreconditionViolation("samples must share one dimension");
    }

    std::vector<TorusPoint> points;
    std::vector<RationalVector> approx;
    const Rational width = eps / 1024;
    for (const auto& s : samples) {
        points.push_back(torusReduce(s).point);
        RationalVector a;
        for (const Scalar& x : points.back().coords) {
            const Interval box = x.refine(width);
            a.push_back((box.lo + box.hi) / 2);
        }
        approx.push_back(std::move(a));
    }

    std::vector<Integer> tried;
    auto attempt = [&](const Integer& m) -> std::optional<SequenceMultiplierCert> {
        if (std::find(tried.begin(), tried.end(), m) != tried.end()) return std::nullopt;
        tried.push_back(m);
        SequenceMultiplierCert cert{samples, eps, quorum, m, {}};
        for (std::size_t n = 0; n < samples.size(); ++n) {
            detail::Closeness c = detail::closeness(samples[n], m, eps, budget);
            if (c.order == Ordering::Less) {
                cert.perIndex.emplace(n, IndexCert{std::move(c.z), detail::certifiedBound(c.distance, eps)});
            }
        }
        if (cert.perIndex.size() >= quorum) return cert;
        return std::nullopt;
    };

    Rational delta = eps / 2;
    for (unsigned step = 0; step < budget.deltaSteps; ++step, delta /= 2) {
        std::size_t centre = 0;
        std::size_t best = 0;
        for (std::size_t i = 0; i < approx.size(); ++i) {
            std::size_t count = 0;
            for (std::size_t j = 0; j < approx.size(); ++j) {
                if (detail::torusDistance(approx[i], approx[j]) < delta) ++count;
            }
            if (count > best) {
                best = count;
                centre = i;
            }
        }
        if (best < quorum) break;  // smaller radii only shrink clusters

        try {
            const MultiplierCert direct = compactMultiplier(points[centre], eps / 2, budget);
            if (auto cert = attempt(direct.m)) return *cert;
        } catch (const BudgetExceeded&) {
        } catch (const Undecided&) {
        }
        if (auto snapped = detail::snapToRational(approx, delta, quorum, budget)) {
            const MultiplierCert order = compactMultiplier(*snapped, eps / 2, budget);
            if (auto cert = attempt(order.m)) return *cert;
        }
    }
    throw InsufficientQuorum("fewer than " + std::to_string(quorum) + " indices verified for every tried multiplier");
}

}  // namespace kalspan
