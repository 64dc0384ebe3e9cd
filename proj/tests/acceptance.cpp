// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "kalspan/jobs.hpp"

using namespace kalspan;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::mt19937_64& rng() {
    static std::mt19937_64 g(20261016);
    return g;
}

long draw(long lo, long hi) { return lo + static_cast<long>(rng()() % static_cast<std::uint64_t>(hi - lo + 1)); }

Rational drawRational() { return Rational(draw(-40, 40), draw(1, 30)); }

// ---- independent oracles, plain GMP only

// dist(x, Z) for rational x.
Rational distToInteger(const Rational& x) {
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    const Rational frac = x - Rational(fl);
    return std::min(frac, Rational(Rational(1) - frac));
}

// |m sqrt(n) - z| < eps for some integer z, decided by squaring.
bool rootClose(long n, long m, const Rational& eps) {
    const mpz_class sq = mpz_class(m) * m * n;
    mpz_class lo;
    mpz_sqrt(lo.get_mpz_t(), sq.get_mpz_t());
    for (const mpz_class& z : {lo, mpz_class(lo + 1)}) {
        const Rational a = Rational(z) - eps;
        const Rational b = Rational(z) + eps;
        if ((a <= 0 || a * a < Rational(sq)) && Rational(sq) < b * b) return true;
    }
    return false;
}

long minimalRootMultiplier(long n, const Rational& eps) {
    for (long m = 1;; ++m) {
        if (rootClose(n, m, eps)) return m;
    }
}

Json instanceJob(const Instance& inst) {
    return Json{{"family", codec::family(inst.family)}, {"space", codec::space(inst.space)}};
}

Json nbhdQuery(const CoordSet& coords, const Rational& r) { return codec::nbhd(BasicNbhd(coords, r)); }

// Jobs recorded by the suites, replayed for the determinism criterion.
std::vector<Job>& recorded() {
    static std::vector<Job> jobs;
    return jobs;
}

// ---- criteria

Outcome dirichletGuarantee() {
    const Rational epsChoices[] = {Rational(1, 3), Rational(1, 5), Rational(1, 8)};
    Outcome out;
    int ok = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t dims = static_cast<std::size_t>(draw(1, 3));
        const Rational eps = epsChoices[draw(0, 2)];
        std::vector<Scalar> t;
        std::vector<Rational> raw;
        for (std::size_t i = 0; i < dims; ++i) {
            raw.push_back(drawRational());
            t.emplace_back(raw.back());
        }
        const MultiplierCert c = dirichletMultiplier(t, eps);
        mpz_class cap = 1, per;
        mpz_cdiv_q(per.get_mpz_t(), eps.get_den_mpz_t(), eps.get_num_mpz_t());
        for (std::size_t i = 0; i < dims; ++i) cap *= per;
        bool good = c.m >= 1 && c.m <= cap && c.bound.isRational() && c.bound.rational() < eps;
        for (std::size_t i = 0; good && i < dims; ++i) {
            const Rational d = raw[i] * Rational(c.m) - Rational(c.z[i]);
            good = abs(d) <= c.bound.rational() && distToInteger(raw[i] * Rational(c.m)) < eps;
        }
        // Minimality against the oracle.
        for (long m = 1; good && m < c.m; ++m) {
            bool all = true;
            for (const Rational& x : raw) all = all && distToInteger(x * m) < eps;
            good = !all;
        }
        ok += good;
        if (trial < 50) {
            Json job{{"t", codec::scalars(t)}, {"eps", codec::rational(eps)}};
            recorded().push_back({"approx", job});
        }
    }
    out.pass = ok == 500;
    out.detail = std::to_string(ok) + "/500 instances within the pigeonhole bound, bound < eps, minimal m";
    return out;
}

Outcome rootTwoLadder() {
    const std::pair<Rational, long> ladder[] = {
        {Rational(8, 100), 5}, {Rational(5, 100), 12}, {Rational(2, 100), 29}, {Rational(6, 1000), 70}};
    Outcome out;
    for (const auto& [eps, expected] : ladder) {
        const long oracle = minimalRootMultiplier(2, eps);
        const MultiplierCert quad = dirichletMultiplier({Scalar::sqrtOf(2)}, eps);
        const MultiplierCert interval = dirichletMultiplier({Scalar(IntervalConst::sqrtOf(2))}, eps);
        const MultiplierCert cf = sqrtConvergentMultiplier(2, eps);
        const bool good = oracle == expected && quad.m == oracle && interval.m == oracle && cf.m == oracle &&
                          verifyMultiplier(quad) && verifyMultiplier(interval);
        out.pass = out.pass && good;
        out.detail += toString(eps) + "->" + quad.m.get_str() + (good ? "" : "(oracle " + std::to_string(oracle) + ")") + " ";
        recorded().push_back({"approx", Json{{"t", Json::array({Json{{"const", "sqrt"}, {"arg", 2}}})}, {"eps", toString(eps)}}});
    }
    out.detail += "matches exhaustive oracle";
    return out;
}

Outcome theoremSweepCriterion() {
    const SweepReport r = theoremSweep(2026, 1200);
    std::map<Profile::Kind, int> perKind;
    for (std::size_t i = 0; i < r.instances.size(); ++i) ++perKind[sweepProfile(2026, i).kind];
    Outcome out;
    out.pass = r.violations == 0 && perKind.size() == 5 && r.inconclusive == 0;
    out.detail = std::to_string(r.instances.size()) + " instances over " + std::to_string(perKind.size()) +
                 " profiles, violations=" + std::to_string(r.violations) + ", inconclusive=" +
                 std::to_string(r.inconclusive);
    recorded().push_back({"theorem-scan", Json{{"seed", 2026}, {"count", 1200}}});
    return out;
}

Outcome equivalenceSuites() {
    int continuityAgree = 0, openAgree = 0, embeddingAgree = 0, total = 0;
    std::string failure;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const Instance inst = generateInstance(7000 + i, sweepProfile(7000, i));
        ++total;
        try {
            const bool acs = isAbsolutelyCauchySummable(inst.family, inst.space).summable;
            const bool direct = kaltonContinuityDirect(inst.family, inst.space).continuous;
            continuityAgree += acs == direct;
            const bool sb = isSemiBasic(inst.family, inst.space).semiBasic;
            const bool proj = linKaltonOpenInjectionDirect(inst.family, inst.space).openInjection;
            openAgree += sb == proj;
            const EmbeddingReport e = embeddingReport(inst.family, inst.space);
            embeddingAgree += e.kalEmbedding == e.lkalEmbedding && e.kalEmbedding != Verdict::Inconclusive;
        } catch (const Error& e) {
            if (failure.empty()) failure = std::string(" first error: ") + e.what();
        }
        if (i < 100) {
            recorded().push_back({"certify", instanceJob(inst)});
            recorded().push_back({"kalton", instanceJob(inst)});
        }
    }
    Outcome out;
    out.pass = continuityAgree == total && openAgree == total && embeddingAgree == total;
    out.detail = "continuity " + std::to_string(continuityAgree) + "/" + std::to_string(total) + ", open injection " +
                 std::to_string(openAgree) + "/" + std::to_string(total) + ", kal/lkal " +
                 std::to_string(embeddingAgree) + "/" + std::to_string(total) + failure;
    return out;
}

// Exhaustive minimum over 0 < |z|_inf <= 25 of the sup norm of sum z_a a, compared with the
// witness lower bound. Entries are scaled to integers; quadratic values A + B sqrt(n) are
// screened in floating point and settled exactly near the bound.
bool gridClearsBound(const Family& f, const Rational& floorBound, double& least) {
    const std::size_t k = f.members.size();
    const std::vector<Coord> coords = detail::unionSupport(f.members);
    long radicand = 0;
    mpz_class den = 1;
    for (const auto& a : f.members) {
        for (const auto& [c, s] : a.entries()) {
            const QuadExt q = s.isQuad() ? s.quad() : QuadExt(s.rational(), 0, 2);
            if (s.isQuad()) radicand = q.radicand();
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.a().get_den_mpz_t());
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.b().get_den_mpz_t());
        }
    }
    std::vector<std::vector<long>> pa(k, std::vector<long>(coords.size())), qa = pa;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t j = 0; j < coords.size(); ++j) {
            const Scalar s = f.members[a].get(coords[j]);
            const QuadExt q = s.isQuad() ? s.quad() : QuadExt(s.rational(), 0, 2);
            pa[a][j] = Rational(q.a() * Rational(den)).get_num().get_si();
            qa[a][j] = Rational(q.b() * Rational(den)).get_num().get_si();
        }
    }
    const double root = radicand ? std::sqrt(static_cast<double>(radicand)) : 0.0;
    const double scaledFloor = floorBound.get_d() * den.get_d();
    const Rational exactFloor = floorBound * Rational(den);
    bool clears = true;
    least = INFINITY;
    std::vector<long> z(k, -25);
    for (;;) {
        bool nonzero = false;
        for (long zi : z) nonzero = nonzero || zi != 0;
        if (nonzero) {
            double best = 0;
            std::vector<std::pair<long, long>> values;
            for (std::size_t j = 0; j < coords.size(); ++j) {
                long A = 0, B = 0;
                for (std::size_t a = 0; a < k; ++a) {
                    A += z[a] * pa[a][j];
                    B += z[a] * qa[a][j];
                }
                values.emplace_back(A, B);
                best = std::max(best, std::fabs(static_cast<double>(A) + static_cast<double>(B) * root));
            }
            least = std::min(least, best / den.get_d());
            if (best < scaledFloor * (1 + 1e-9)) {
                bool exactClear = false;
                for (const auto& [A, B] : values) {
                    const Scalar v = radicand ? Scalar(QuadExt(A, B, radicand)) : Scalar(Rational(A));
                    if (compare(abs(v), Scalar(exactFloor), dyadic(200)) != Ordering::Less) exactClear = true;
                }
                clears = clears && exactClear;
            }
        }
        std::size_t pos = 0;
        while (pos < k && z[pos] == 25) z[pos++] = -25;
        if (pos == k) break;
        ++z[pos];
    }
    return clears;
}

Outcome finiteCollapse() {
    int agree = 0, fullRank = 0, gridOk = 0;
    double worstRatio = INFINITY;
    const long radicands[] = {2, 3, 5, 7};
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t d = static_cast<std::size_t>(draw(1, 4));
        const std::size_t k = static_cast<std::size_t>(draw(2, 3));
        Profile p;
        switch (trial % 3) {
            case 0: p = Profile::rationalFinite(d, static_cast<std::size_t>(draw(1, 3))); break;
            case 1: p = Profile::quadFinite(d, k, radicands[draw(0, 3)]); break;
            default: p = Profile::plantedDependence(d, k); break;
        }
        const Instance inst = generateInstance(static_cast<std::uint64_t>(9000 + trial), p);
        const Family& f = inst.family;
        const bool ti = isTopologicallyIndependent(f, inst.space).independent;
        const bool sb = isSemiBasic(f, inst.space).semiBasic;
        const RankResult rank = exactRank(detail::memberMatrix(f.members, detail::unionSupport(f.members)));
        const bool full = rank.rank == f.members.size();
        agree += ti == sb && sb == full;
        if (!full) continue;
        ++fullRank;
        const Rational bound = WitnessSchema{f}.discretenessBound();
        double least = 0;
        if (gridClearsBound(f, bound, least)) ++gridOk;
        worstRatio = std::min(worstRatio, least / bound.get_d());
        if (trial < 50) recorded().push_back({"certify", instanceJob(inst)});
    }
    Outcome out;
    out.pass = agree == 500 && gridOk == fullRank;
    char ratio[32];
    std::snprintf(ratio, sizeof ratio, "%.3f", worstRatio);
    out.detail = "TI<=>SB<=>full rank on " + std::to_string(agree) + "/500; grid minimum >= witness bound on " +
                 std::to_string(gridOk) + "/" + std::to_string(fullRank) + " full-rank families (worst min/bound " +
                 ratio + ")";
    return out;
}

// Lovasz and size reduction re-checked with a separate Gram-Schmidt.
bool lovaszExact(const LatticeBasis& b, const Rational& delta) {
    const std::size_t n = b.rows.size();
    std::vector<RationalVector> star;
    std::vector<Rational> norm;
    std::vector<std::vector<Rational>> mu(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) {
        RationalVector v = b.rows[i];
        for (std::size_t j = 0; j < i; ++j) {
            Rational dot = 0;
            for (std::size_t c = 0; c < v.size(); ++c) dot += b.rows[i][c] * star[j][c];
            mu[i][j] = dot / norm[j];
            for (std::size_t c = 0; c < v.size(); ++c) v[c] -= mu[i][j] * star[j][c];
        }
        Rational sq = 0;
        for (const Rational& x : v) sq += x * x;
        star.push_back(v);
        norm.push_back(sq);
    }
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (abs(mu[i][j]) > Rational(1, 2)) return false;
        }
        if (norm[i] < (delta - mu[i][i - 1] * mu[i][i - 1]) * norm[i - 1]) return false;
    }
    return true;
}

Rational determinantOf(std::vector<RationalVector> m) {
    const std::size_t n = m.size();
    Rational det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && m[p][c] == 0) ++p;
        if (p == n) return 0;
        if (p != c) {
            std::swap(m[p], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const Rational f = m[r][c] / m[c][c];
            for (std::size_t j = c; j < n; ++j) m[r][j] -= f * m[c][j];
        }
    }
    return det;
}

Outcome lllSoundness() {
    const Rational delta(3, 4);
    int lovasz = 0, factorChecks = 0, factorOk = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
        LatticeBasis b;
        do {
            b.rows.assign(n, RationalVector(n));
            for (auto& row : b.rows) {
                for (auto& x : row) x = Rational(draw(-50, 50));
            }
        } while (determinantOf(b.rows) == 0);
        const LatticeBasis r = lllReduce(b, delta);
        const bool sameLattice = abs(determinantOf(r.rows)) == abs(determinantOf(b.rows));
        lovasz += lovaszExact(r, delta) && sameLattice;
        if (n <= 4) {
            ++factorChecks;
            Rational first = 0;
            for (const Rational& x : r.rows[0]) first += x * x;
            const auto sv = shortestVectorExhaustive(r, Rational(Integer(static_cast<long>(std::sqrt(first.get_d())) + 1)),
                                                     Norm::Euclidean);
            if (sv && first <= Rational(Integer(1) << (n - 1)) * sv->euclideanSq) ++factorOk;
        }
    }
    Outcome out;
    out.pass = lovasz == 200 && factorOk == factorChecks;
    out.detail = "Lovasz + size reduction + lattice kept on " + std::to_string(lovasz) + "/200; approximation factor on " +
                 std::to_string(factorOk) + "/" + std::to_string(factorChecks) + " bases of dim <= 4";
    return out;
}

Outcome defeaterSoundness() {
    int instances = 0, defeaters = 0, valid = 0, jobFailures = 0;
    std::map<std::string, int> kinds;
    for (std::uint64_t seed = 0; instances < 200; ++seed) {
        const std::size_t d = static_cast<std::size_t>(draw(1, 3));
        Profile p;
        switch (seed % 3) {
            case 0: p = Profile::plantedDependence(d, static_cast<std::size_t>(draw(2, 4))); break;
            case 1: p = Profile::pollutedTail(static_cast<std::size_t>(draw(0, 2))); break;
            default: p = Profile::quadFinite(d, d + 1, seed % 2 ? 2 : 3); break;
        }
        const Instance inst = generateInstance(31000 + seed, p);
        const IndependenceResult ti = isTopologicallyIndependent(inst.family, inst.space);
        if (ti.independent || ti.defeat->kind == DefeatGenerator::Kind::ZeroMember) continue;
        ++instances;
        ++kinds[toString(ti.defeat->kind)];
        CoordSet all;
        for (Coord c = 0; c < inst.family.coreCoords().size() + 3; ++c) {
            if (!inst.space.isEuclidean() || c < inst.space.dim) all.insert(c);
        }
        Json job = instanceJob(inst);
        job["queries"] = Json::array({nbhdQuery(all, Rational(1, 10)), nbhdQuery({*all.begin()}, Rational(1, 40))});
        const Report r = runJob({"certify", job});
        if (r.exit != ExitCode::Decided) {
            ++jobFailures;
            continue;
        }
        if (instances <= 50) recorded().push_back({"certify", job});
        for (const auto& cert : r.doc.at("certificates")) {
            if (cert.at("kind") != "defeater") continue;
            ++defeaters;
            // Through the text form, so the verifier sees only what was serialized.
            const Report check = runJobText("verify", cert.dump());
            valid += check.exit == ExitCode::Decided && check.doc.at("valid") == true;
        }
    }
    Outcome out;
    out.pass = jobFailures == 0 && defeaters >= 2 * instances && valid == defeaters;
    std::string mix;
    for (const auto& [k, n] : kinds) mix += (mix.empty() ? "" : ", ") + k + " " + std::to_string(n);
    out.detail = std::to_string(instances) + " planted instances (" + mix + "), " + std::to_string(valid) + "/" + std::to_string(defeaters) + " defeaters verified";
    if (jobFailures) out.detail += ", " + std::to_string(jobFailures) + " certify jobs failed";
    return out;
}

Outcome determinism() {
    std::vector<Job> jobs = recorded();
    jobs.push_back({"theorem-scan", Json{{"seed", 2026}, {"count", 300}, {"budget", Json{{"threads", 1}}}}});
    std::vector<std::string> first;
    for (const Job& j : jobs) first.push_back(formatReport(runJob(j).doc, Format::Json));
    int identical = 0, verified = 0, withCerts = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        bool same = true;
        for (int run = 0; run < 2; ++run) same = same && formatReport(runJob(jobs[i]).doc, Format::Json) == first[i];
        identical += same;
        const Json doc = Json::parse(first[i]);
        if (doc.at("kind") == "error" || doc.at("kind") == "theorem-scan") continue;
        ++withCerts;
        verified += runJobText("verify", first[i]).doc.value("valid", false);
    }
    Outcome out;
    out.pass = identical == static_cast<int>(jobs.size()) && verified == withCerts;
    out.detail = std::to_string(identical) + "/" + std::to_string(jobs.size()) +
                 " job documents byte-identical over 3 runs; " + std::to_string(verified) + "/" +
                 std::to_string(withCerts) + " reports re-verify";
    return out;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"AC1 Dirichlet guarantee", dirichletGuarantee},
        {"AC2 sqrt(2) ladder", rootTwoLadder},
        {"AC3 theorem sweep", theoremSweepCriterion},
        {"AC4 equivalence suites", equivalenceSuites},
        {"AC5 finite-dimensional collapse", finiteCollapse},
        {"AC6 LLL soundness", lllSoundness},
        {"AC7 defeater soundness", defeaterSoundness},
        {"AC8 certificate determinism", determinism},
    };
    bool all = true;
    for (const auto& [name, run] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
