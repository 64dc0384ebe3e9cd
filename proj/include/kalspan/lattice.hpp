#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kalspan/linalg.hpp"
#include "kalspan/scalar.hpp"

namespace kalspan {

using RationalVector = std::vector<Rational>;
using IntegerVector = std::vector<Integer>;

/// Rows spanning a lattice; rows must be linearly independent over Q.
struct LatticeBasis {
    std::vector<RationalVector> rows;

    std::size_t rank() const { return rows.size(); }
    std::size_t ambientDim() const { return rows.empty() ? 0 : rows.front().size(); }
};

inline Rational dotProduct(const RationalVector& x, const RationalVector& y) {
    Rational s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

/// Nearest integer, ties rounded up.
inline Integer roundHalfUp(const Rational& q) { return floorOf(q + Rational(1, 2)); }

struct GramSchmidt {
    std::vector<RationalVector> mu;  // mu[i][j] for j < i
    RationalVector normSq;           // |b*_i|^2
};

inline GramSchmidt gramSchmidt(const std::vector<RationalVector>& rows) {
    const std::size_t n = rows.size();
    GramSchmidt gs;
    gs.mu.assign(n, RationalVector(n));
    gs.normSq.assign(n, Rational(0));
    std::vector<RationalVector> star(n);
    for (std::size_t i = 0; i < n; ++i) {
        star[i] = rows[i];
        for (std::size_t j = 0; j < i; ++j) {
            gs.mu[i][j] = dotProduct(rows[i], star[j]) / gs.normSq[j];
            for (std::size_t k = 0; k < star[i].size(); ++k) star[i][k] -= gs.mu[i][j] * star[j][k];
        }
        gs.normSq[i] = dotProduct(star[i], star[i]);
        if (gs.normSq[i] == 0) throw DependentRows("basis row " + std::to_string(i) + " depends on earlier rows");
    }
    return gs;
}

/// Exact LLL reduction with rational Gram-Schmidt data updated in place on every swap.
inline LatticeBasis lllReduce(LatticeBasis basis, const Rational& delta) {
    if (delta <= Rational(1, 4) || delta > 1) throw PreconditionViolation("LLL delta must lie in (1/4, 1]");
    auto& b = basis.rows;
    const std::size_t n = b.size();
    if (n == 0) return basis;
    GramSchmidt gs = gramSchmidt(b);
    auto& mu = gs.mu;
    auto& bb = gs.normSq;

    auto reduce = [&](std::size_t k, std::size_t l) {
        if (abs(mu[k][l]) <= Rational(1, 2)) return;
        const Rational q(roundHalfUp(mu[k][l]));
        for (std::size_t c = 0; c < b[k].size(); ++c) b[k][c] -= q * b[l][c];
        mu[k][l] -= q;
        for (std::size_t i = 0; i < l; ++i) mu[k][i] -= q * mu[l][i];
    };

    auto swapRows = [&](std::size_t k) {
        const Rational m = mu[k][k - 1];
        const Rational bNew = bb[k] + m * m * bb[k - 1];
        mu[k][k - 1] = m * bb[k - 1] / bNew;
        bb[k] = bb[k - 1] * bb[k] / bNew;
        bb[k - 1] = bNew;
        std::swap(b[k], b[k - 1]);
        for (std::size_t j = 0; j + 1 < k; ++j) std::swap(mu[k][j], mu[k - 1][j]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const Rational t = mu[i][k];
            mu[i][k] = mu[i][k - 1] - m * t;
            mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k];
        }
    };

    std::size_t k = 1;
    while (k < n) {
        reduce(k, k - 1);
        if (bb[k] < (delta - mu[k][k - 1] * mu[k][k - 1]) * bb[k - 1]) {
            swapRows(k);
            k = std::max<std::size_t>(1, k - 1);
        } else {
            for (std::size_t l = k - 1; l-- > 0;) reduce(k, l);
            ++k;
        }
    }
    return basis;
}

/// Size reduction and the Lovasz condition, recomputed from scratch.
inline bool isLllReduced(const LatticeBasis& basis, const Rational& delta) {
    const GramSchmidt gs = gramSchmidt(basis.rows);
    for (std::size_t i = 0; i < basis.rank(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (abs(gs.mu[i][j]) > Rational(1, 2)) return false;
        }
        if (i > 0 && gs.normSq[i] < (delta - gs.mu[i][i - 1] * gs.mu[i][i - 1]) * gs.normSq[i - 1]) return false;
    }
    return true;
}

enum class Norm { Euclidean, Sup };

struct ShortVector {
    RationalVector vector;
    IntegerVector coeffs;  // vector = sum coeffs[i] * rows[i]
    Rational euclideanSq;
    Rational sup;
};

struct EnumerationBudget {
    std::size_t maxRank = 5;
    std::uint64_t maxPoints = 4'000'000;
};

/// Shortest nonzero lattice vector of length <= radiusBound, by enumerating the coefficient box
/// |c_i| <= sqrt((G^-1)_ii) * R2 implied by the dual basis (G the Gram matrix). Ties go to the
/// lexicographically smallest vector. nullopt means no nonzero vector lies within the bound.
inline std::optional<ShortVector> shortestVectorExhaustive(const LatticeBasis& basis, const Rational& radiusBound,
                                                          Norm norm, const EnumerationBudget& budget = {}) {
    const std::size_t n = basis.rank();
    const std::size_t dim = basis.ambientDim();
    if (radiusBound <= 0) throw PreconditionViolation("radius bound must be positive");
    if (n > budget.maxRank) {
        throw BudgetExceeded("exhaustive enumeration limited to rank " + std::to_string(budget.maxRank));
    }
    if (n == 0) return std::nullopt;
    gramSchmidt(basis.rows);  // rejects dependent rows

    Matrix gram(n, std::vector<Scalar>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) gram[i][j] = Scalar(dotProduct(basis.rows[i], basis.rows[j]));
    }
    const Matrix gramInv = *inverse(gram);
    const Rational r2 = norm == Norm::Euclidean ? Rational(radiusBound * radiusBound)
                                                : Rational(radiusBound * radiusBound * Rational(dim));

    IntegerVector bound(n);
    std::uint64_t points = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const Integer cap = floorOf(gramInv[i][i].rational() * r2);
        mpz_sqrt(bound[i].get_mpz_t(), cap.get_mpz_t());
        const double side = 2.0 * bound[i].get_d() + 1.0;
        if (side > static_cast<double>(budget.maxPoints) ||
            static_cast<double>(points) * side > static_cast<double>(budget.maxPoints)) {
            throw BudgetExceeded("enumeration box exceeds " + std::to_string(budget.maxPoints) + " points");
        }
        points *= static_cast<std::uint64_t>(side);
    }

    // Integer image of the basis under the common denominator.
    Integer den = 1;
    for (const auto& row : basis.rows) {
        for (const Rational& x : row) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
    }
    std::vector<IntegerVector> rows(n, IntegerVector(dim));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dim; ++j) rows[i][j] = basis.rows[i][j].get_num() * (den / basis.rows[i][j].get_den());
    }
    const Integer scaledR = floorOf(radiusBound * Rational(den));
    const Rational scaledR2 = radiusBound * radiusBound * Rational(den * den);

    std::optional<IntegerVector> best;
    IntegerVector bestCoeffs;
    Integer bestMeasure;
    IntegerVector coeffs(n);
    std::vector<IntegerVector> partial(n + 1, IntegerVector(dim));

    std::function<void(std::size_t)> walk = [&](std::size_t i) {
        if (i == n) {
            const IntegerVector& x = partial[n];
            Integer measure = 0;
            bool nonzero = false;
            for (const Integer& v : x) {
                if (v != 0) nonzero = true;
                if (norm == Norm::Euclidean) {
                    measure += v * v;
                } else if (abs(v) > measure) {
                    measure = abs(v);
                }
            }
            if (!nonzero) return;
            if (norm == Norm::Euclidean ? Rational(measure) > scaledR2 : measure > scaledR) return;
            if (!best || measure < bestMeasure || (measure == bestMeasure && x < *best)) {
                best = x;
                bestMeasure = measure;
                bestCoeffs = coeffs;
            }
            return;
        }
        for (Integer c = -bound[i]; c <= bound[i]; ++c) {
            coeffs[i] = c;
            for (std::size_t j = 0; j < dim; ++j) partial[i + 1][j] = partial[i][j] + c * rows[i][j];
            walk(i + 1);
        }
    };
    walk(0);

    if (!best) return std::nullopt;
    ShortVector out;
    out.coeffs = bestCoeffs;
    out.euclideanSq = 0;
    out.sup = 0;
    for (const Integer& v : *best) {
        const Rational x = makeRational(v, den);
        out.vector.push_back(x);
        out.euclideanSq += x * x;
        out.sup = std::max(out.sup, Rational(abs(x)));
    }
    return out;
}

/// Integer tuple z != 0 with a certified bound on |sum z_i v_i|.
struct RelationCert {
    std::vector<Scalar> inputs;
    Rational eps;  // 0 requests an exact relation
    IntegerVector z;
    Rational bound;  // certified upper bound on |sum z_i v_i|, < eps (== 0 in exact mode)
    Integer height;
};

struct RelationSearch {
    std::optional<RelationCert> cert;
    /// True when the search covered every tuple of height <= H, so a missing cert proves nonexistence.
    bool exhaustive = false;
};

struct RelationBudget {
    std::uint64_t enumerationPoints = 200'000;
};

namespace detail {

inline Integer heightOf(const IntegerVector& z) {
    Integer h = 0;
    for (const Integer& x : z) h = std::max(h, Integer(abs(x)));
    return h;
}

/// Flips the sign so the first nonzero entry is positive.
inline IntegerVector signNormalized(IntegerVector z) {
    for (const Integer& x : z) {
        if (x == 0) continue;
        if (x < 0) {
            for (Integer& y : z) y = -y;
        }
        break;
    }
    return z;
}

inline Scalar combination(const IntegerVector& z, const std::vector<Scalar>& v) {
    Scalar s;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] != 0) s = s + v[i].scaledBy(Rational(z[i]));
    }
    return s;
}

/// Certified |sum z v| < eps (or == 0 when eps == 0); returns the rational upper bound.
inline std::optional<Rational> certifyRelation(const IntegerVector& z, const std::vector<Scalar>& v,
                                               const Rational& eps) {
    const Scalar value = combination(z, v);
    if (eps == 0) {
        if (value.isExact() && value.isZero()) return Rational(0);
        return std::nullopt;
    }
    const Scalar mag = abs(value);
    if (compare(mag, Scalar(eps), eps / Rational(Integer(1) << 40)) != Ordering::Less) return std::nullopt;
    if (mag.isRational()) return mag.rational();
    for (Rational w = eps / 4;; w /= 16) {
        const Rational hi = mag.refine(w).hi;
        if (hi < eps) return hi;
    }
}

}  // namespace detail

inline bool verifyRelation(const RelationCert& cert) {
    if (cert.z.size() != cert.inputs.size() || detail::heightOf(cert.z) == 0) return false;
    if (detail::heightOf(cert.z) != cert.height) return false;
    if (cert.eps == 0) return cert.bound == 0 && detail::certifyRelation(cert.z, cert.inputs, 0).has_value();
    if (cert.bound >= cert.eps) return false;
    const Scalar mag = abs(detail::combination(cert.z, cert.inputs));
    return compare(mag, Scalar(cert.bound), cert.eps / Rational(Integer(1) << 40)) != Ordering::Greater &&
           compare(mag, Scalar(cert.eps), cert.eps / Rational(Integer(1) << 40)) == Ordering::Less;
}

/// Search for z with 0 < max|z_i| <= H and |sum z_i v_i| < eps (exact relation when eps == 0).
///
/// Small height boxes are enumerated shell by shell in increasing height, so the result has
/// minimal height and is then lexicographically smallest among sign-normalized tuples. Larger
/// boxes fall back to LLL on the lattice spanned by rows (e_i | C v_i) with C = H / eps; every
/// candidate is re-verified with certified arithmetic.
inline RelationSearch integerRelation(const std::vector<Scalar>& v, const Rational& eps, const Integer& height,
                                      const RelationBudget& budget = {}) {
    if (eps < 0) throw PreconditionViolation("relation tolerance must be non-negative");
    if (height < 1) throw PreconditionViolation("relation height must be at least 1");
    const std::size_t n = v.size();
    RelationSearch result;
    if (n == 0) {
        result.exhaustive = true;
        return result;
    }
    auto finish = [&](IntegerVector z, Rational bound) {
        RelationCert cert;
        cert.inputs = v;
        cert.eps = eps;
        cert.height = detail::heightOf(z);
        cert.z = std::move(z);
        cert.bound = std::move(bound);
        result.cert = std::move(cert);
    };

    const double side = 2.0 * height.get_d() + 1.0;
    const double boxPoints = std::pow(side, static_cast<double>(n));
    if (boxPoints <= static_cast<double>(budget.enumerationPoints)) {
        std::vector<double> approx(n);
        std::vector<double> magnitude(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Interval box = v[i].enclose(64);
            approx[i] = Rational((box.lo + box.hi) / 2).get_d();
            magnitude[i] = std::abs(approx[i]) + box.width().get_d();
        }
        const double epsD = eps.get_d();
        const long hMax = height.get_si();
        IntegerVector z(n);
        std::vector<long> zi(n);
        for (long h = 1; h <= hMax; ++h) {
            std::optional<IntegerVector> bestZ;
            Rational bestBound;
            // Tuples whose first entry of modulus h sits at position k.
            std::function<void(std::size_t, std::size_t)> fill = [&](std::size_t pos, std::size_t k) {
                if (pos == n) {
                    double s = 0.0;
                    double scale = 1.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        s += static_cast<double>(zi[i]) * approx[i];
                        scale += std::abs(static_cast<double>(zi[i])) * magnitude[i];
                    }
                    const double margin = 1e-9 * scale;
                    if (std::abs(s) - margin > epsD) return;
                    for (std::size_t i = 0; i < n; ++i) z[i] = zi[i];
                    const IntegerVector normalized = detail::signNormalized(z);
                    if (normalized != z) return;  // the positive twin is visited too
                    if (bestZ && !(z < *bestZ)) return;
                    if (auto bound = detail::certifyRelation(z, v, eps)) {
                        bestZ = z;
                        bestBound = *bound;
                    }
                    return;
                }
                if (pos < k) {
                    for (long c = -(h - 1); c <= h - 1; ++c) {
                        zi[pos] = c;
                        fill(pos + 1, k);
                    }
                } else if (pos == k) {
                    for (long c : {-h, h}) {
                        zi[pos] = c;
                        fill(pos + 1, k);
                    }
                } else {
                    for (long c = -h; c <= h; ++c) {
                        zi[pos] = c;
                        fill(pos + 1, k);
                    }
                }
            };
            for (std::size_t k = 0; k < n; ++k) fill(0, k);
            if (bestZ) {
                finish(*bestZ, bestBound);
                return result;
            }
        }
        result.exhaustive = true;
        return result;
    }

    // Lattice route.
    std::vector<RationalVector> columns;
    if (eps == 0) {
        RationalVector ra(n);
        RationalVector rb(n);
        bool anyQuad = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!v[i].isExact()) throw InexactEntries("exact relation search needs exact inputs");
            if (v[i].isRational()) {
                ra[i] = v[i].rational();
            } else {
                ra[i] = v[i].quad().a();
                rb[i] = v[i].quad().b();
                anyQuad = true;
            }
        }
        columns.push_back(ra);
        if (anyQuad) columns.push_back(rb);
    } else {
        RationalVector approx(n);
        const Rational width = eps / Rational(8 * static_cast<long>(n)) / Rational(height);
        for (std::size_t i = 0; i < n; ++i) {
            const Interval box = v[i].refine(width);
            approx[i] = (box.lo + box.hi) / 2;
        }
        columns.push_back(approx);
    }
    Rational scale = eps == 0 ? Rational(Integer(1) << (64 + 8 * n)) : Rational(height) / eps;
    if (eps == 0) scale *= Rational(height);
    LatticeBasis lattice;
    for (std::size_t i = 0; i < n; ++i) {
        RationalVector row(n + columns.size());
        row[i] = 1;
        for (std::size_t c = 0; c < columns.size(); ++c) row[n + c] = scale * columns[c][i];
        lattice.rows.push_back(std::move(row));
    }
    const LatticeBasis reduced = lllReduce(lattice, Rational(99, 100));

    std::vector<IntegerVector> candidates;
    auto addCandidate = [&](const RationalVector& row, int sign, const RationalVector* other) {
        IntegerVector z(n);
        for (std::size_t i = 0; i < n; ++i) {
            Rational x = row[i];
            if (other != nullptr) x += sign * (*other)[i];
            z[i] = x.get_num();
        }
        z = detail::signNormalized(std::move(z));
        const Integer h = detail::heightOf(z);
        if (h != 0 && h <= height) candidates.push_back(std::move(z));
    };
    for (std::size_t i = 0; i < reduced.rank(); ++i) {
        addCandidate(reduced.rows[i], 1, nullptr);
        for (std::size_t j = i + 1; j < reduced.rank(); ++j) {
            addCandidate(reduced.rows[i], 1, &reduced.rows[j]);
            addCandidate(reduced.rows[i], -1, &reduced.rows[j]);
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const IntegerVector& x, const IntegerVector& y) {
        const Integer hx = detail::heightOf(x);
        const Integer hy = detail::heightOf(y);
        return hx != hy ? hx < hy : x < y;
    });
    for (const IntegerVector& z : candidates) {
        if (auto bound = detail::certifyRelation(z, v, eps)) {
            finish(z, *bound);
            return result;
        }
    }
    return result;
}

/// Rows and columns of a nonsingular maximal minor, with its determinant.
struct PivotCert {
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
    Scalar minorDeterminant;
};

struct RankResult {
    std::size_t rank = 0;
    PivotCert pivots;
};

/// Rank over Q or Q(sqrt(n)), which equals the rank over R.
inline RankResult exactRank(const Matrix& m) {
    requireExact(m);
    const Echelon e = echelon(m);
    RankResult out;
    out.rank = e.rank();
    out.pivots.cols = e.pivotCols;
    out.pivots.rows.assign(e.rowOrigin.begin(), e.rowOrigin.begin() + static_cast<std::ptrdiff_t>(e.rank()));
    std::sort(out.pivots.rows.begin(), out.pivots.rows.end());
    Matrix minor;
    for (std::size_t r : out.pivots.rows) {
        std::vector<Scalar> row;
        for (std::size_t c : out.pivots.cols) row.push_back(m[r][c]);
        minor.push_back(std::move(row));
    }
    out.pivots.minorDeterminant = out.rank == 0 ? Scalar(1) : determinant(minor);
    if (out.pivots.minorDeterminant.isZero()) throw Inconsistency("pivot minor vanished");
    return out;
}

}  // namespace kalspan
