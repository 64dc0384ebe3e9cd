#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kalspan/properties.hpp"

namespace kalspan {

using IntTuple = std::map<std::size_t, Integer>;
using ScalarTuple = std::map<std::size_t, Scalar>;

/// kal_A(z) = sum z_a a.
inline SparseVector kaltonEval(const Family& a, const IntTuple& z) {
    SparseVector out;
    for (const auto& [i, zi] : z) {
        if (zi != 0) out += Scalar(Rational(zi)) * a.member(i);
    }
    return out;
}

/// lkal_A(r) = sum r_a a.
inline SparseVector linKaltonEval(const Family& a, const ScalarTuple& r) {
    SparseVector out;
    for (const auto& [i, ri] : r) {
        if (!ri.isZero()) out += ri * a.member(i);
    }
    return out;
}

/// Codomain neighbourhood V(I, eps) with the finite F whose complement vanishes on I, and
/// the domain radius eta: |r_a| < eta on F maps into V.
struct ContinuityStep {
    BasicNbhd v;
    std::vector<std::size_t> f;
    Rational eta;
};

struct ContinuityResult {
    bool continuous = true;
    std::vector<ContinuityStep> schedule;
    std::optional<BasicNbhd> counterexample;
};

namespace detail {

/// V({0..k}, 1/(k+1)) for k up to two past every coordinate the family's description uses.
inline std::vector<BasicNbhd> prefixSchedule(const Family& a, const AmbientSpace& s) {
    std::size_t top = 0;
    if (s.isEuclidean()) {
        top = s.dim - 1;
    } else {
        const CoordSet core = a.coreCoords();
        if (!core.empty()) top = *core.rbegin();
        if (a.tail) top = std::max<std::size_t>(top, a.tail->start);
        top += 2;
    }
    std::vector<BasicNbhd> out;
    CoordSet coords;
    for (std::size_t k = 0; k <= top; ++k) {
        coords.insert(k);
        out.emplace_back(coords, Rational(1, static_cast<long>(k + 1)));
    }
    return out;
}

}  // namespace detail

/// Direct continuity check of lkal_A on the prefix schedule. A tail whose base is visible on I
/// puts infinitely many members outside every finite F, so continuity fails there.
inline ContinuityResult kaltonContinuityDirect(const Family& a, const AmbientSpace& s) {
    detail::requireRepresentable(a, s);
    ContinuityResult out;
    for (const BasicNbhd& v : detail::prefixSchedule(a, s)) {
        if (a.tail && !a.tail->base.restrictedTo(v.coords).isZero()) {
            out.continuous = false;
            out.counterexample = v;
            return out;
        }
        ContinuityStep step{v, {}, Rational(0)};
        Rational total = 0;
        for (std::size_t i = 0; i < a.finiteSize(); ++i) {
            if (a.members[i].restrictedTo(v.coords).isZero()) continue;
            step.f.push_back(i);
            total += upperBound(seminorm(a.members[i], v.coords), detail::slack());
        }
        if (a.tail) {
            for (Coord c : v.coords) {
                if (c < a.tail->start) continue;
                step.f.push_back(a.finiteSize() + (c - a.tail->start));
                total += upperBound(seminorm(a.member(step.f.back()), v.coords), detail::slack());
            }
        }
        step.eta = v.radius / (total + 1);
        if (!verifySummabilitySet(a, v, step.f)) throw Inconsistency("continuity step left a visible member out of F");
        out.schedule.push_back(std::move(step));
    }
    return out;
}

/// Continuity of lkal_A, once through summability and once directly; disagreement throws.
inline ContinuityResult isKaltonContinuous(const Family& a, const AmbientSpace& s) {
    const SummabilityResult acs = isAbsolutelyCauchySummable(a, s);
    ContinuityResult direct = kaltonContinuityDirect(a, s);
    if (acs.summable != direct.continuous) {
        throw Inconsistency("summability and direct continuity disagree");
    }
    if (!direct.continuous && acs.counterexample) direct.counterexample = acs.counterexample;
    return direct;
}

/// |r_a| <= k * max_{c in supp y} |x_c| for x = lkal_A(r): y kills every other member, y . a = 1.
struct CoordinateBound {
    std::size_t a = 0;
    std::map<Coord, Scalar> functional;
    Rational k;
};

struct OpenInjectionResult {
    bool openInjection = true;
    std::vector<CoordinateBound> bounds;
    std::optional<std::size_t> offending;
};

/// Continuity of each coordinate projection on span A, via a dual solve for a functional.
inline OpenInjectionResult linKaltonOpenInjectionDirect(const Family& f, const AmbientSpace& s) {
    detail::requireRepresentable(f, s);
    detail::requireExactFamily(f);
    OpenInjectionResult out;
    std::vector<std::size_t> toCheck;
    for (std::size_t i = 0; i < f.finiteSize(); ++i) toCheck.push_back(i);
    for (std::size_t i : detail::tailRepresentatives(f)) toCheck.push_back(i);

    for (std::size_t index : toCheck) {
        const SparseVector a = f.member(index);
        const CoordSet star = detail::saturatedCoords(f, a, s);
        const std::vector<Coord> cols(star.begin(), star.end());
        Matrix m;
        std::vector<Scalar> rhs;
        for (std::size_t g : detail::visibleMembers(f, star, index)) {
            std::vector<Scalar> row;
            const SparseVector gv = f.member(g);
            for (Coord c : cols) row.push_back(gv.get(c));
            m.push_back(std::move(row));
            rhs.emplace_back();
        }
        std::vector<Scalar> aRow;
        for (Coord c : cols) aRow.push_back(a.get(c));
        m.push_back(std::move(aRow));
        rhs.emplace_back(1);
        const auto y = cols.empty() ? std::nullopt : solve(m, rhs);
        if (!y) {
            out.openInjection = false;
            out.offending = index;
            out.bounds.clear();
            return out;
        }
        CoordinateBound b{index, {}, Rational(0)};
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if ((*y)[c].isZero()) continue;
            b.functional.emplace(cols[c], (*y)[c]);
            b.k += upperBound(abs((*y)[c]), detail::slack());
        }
        out.bounds.push_back(std::move(b));
    }
    return out;
}

/// lkal_A is an open injection onto span A, once as semi-basic and once directly.
inline OpenInjectionResult isLinKaltonOpenInjection(const Family& a, const AmbientSpace& s) {
    const SemiBasicResult sb = isSemiBasic(a, s);
    OpenInjectionResult direct = linKaltonOpenInjectionDirect(a, s);
    if (sb.semiBasic != direct.openInjection) throw Inconsistency("semi-basic and projection-continuity disagree");
    return direct;
}

struct EmbeddingReport {
    Verdict continuous = Verdict::Inconclusive;
    std::optional<BasicNbhd> counterexample;
    Verdict injective = Verdict::Inconclusive;  // kal_A over Z
    std::optional<IntegerVector> relation;
    std::optional<PivotCert> pivots;  // finite core, when it has full rank
    Verdict openOntoImage = Verdict::Inconclusive;
    Verdict linOpenInjection = Verdict::Inconclusive;
    Verdict kalEmbedding = Verdict::Inconclusive;
    Verdict lkalEmbedding = Verdict::Inconclusive;
};

/// Both embedding verdicts, computed independently and required to agree.
inline EmbeddingReport embeddingReport(const Family& a, const AmbientSpace& s) {
    EmbeddingReport r;
    const ContinuityResult cont = isKaltonContinuous(a, s);
    r.continuous = verdictOf(cont.continuous);
    r.counterexample = cont.counterexample;

    // Fresh tail coordinates force tail coefficients to zero, so integer relations live on the core.
    r.relation = exactIntegerRelation(a.members);
    r.injective = verdictOf(!r.relation);
    const std::vector<Coord> coords = detail::unionSupport(a.members);
    if (!a.members.empty()) {
        const RankResult rank = exactRank(detail::memberMatrix(a.members, coords));
        if (rank.rank == a.finiteSize()) r.pivots = rank.pivots;
    }
    r.openOntoImage = verdictOf(isTopologicallyIndependent(a, s).independent);
    r.linOpenInjection = verdictOf(isLinKaltonOpenInjection(a, s).openInjection);

    r.kalEmbedding = verdictOf(r.injective == Verdict::Yes && r.continuous == Verdict::Yes &&
                               r.openOntoImage == Verdict::Yes);
    r.lkalEmbedding = verdictOf(r.continuous == Verdict::Yes && r.linOpenInjection == Verdict::Yes);
    if (r.kalEmbedding != r.lkalEmbedding) throw Inconsistency("kal and lkal embedding verdicts disagree");
    return r;
}

}  // namespace kalspan
