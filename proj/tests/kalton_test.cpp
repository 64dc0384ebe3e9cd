#include <gtest/gtest.h>

#include "kalspan/kalton.hpp"
#include "test_support.hpp"

namespace kalspan {
namespace {

SparseVector e(Coord i, const Scalar& s = Scalar(1)) { return SparseVector::unit(i, s); }

Family finite(std::vector<SparseVector> members) { return Family{std::move(members), std::nullopt}; }

Family unitTail() { return Family{{}, TailSpec{{}, 0, Rational(1), Rational(1)}}; }

TEST(KaltonEval, Examples) {
    const Family f = finite({e(0), e(1)});
    EXPECT_EQ(kaltonEval(f, {{0, Integer(3)}, {1, Integer(-2)}}), (SparseVector{{0, Scalar(3)}, {1, Scalar(-2)}}));
    EXPECT_TRUE(kaltonEval(f, {}).isZero());
    const Family t{{}, TailSpec{{}, 7, Rational(1), Rational(1)}};
    EXPECT_EQ(kaltonEval(t, {{5, Integer(4)}}), e(12, Scalar(4)));
    EXPECT_THROW(kaltonEval(f, {{2, Integer(1)}}), IndexOutOfFamily);
}

TEST(LinKaltonEval, Examples) {
    EXPECT_EQ(linKaltonEval(finite({e(0, Scalar(2))}), {{0, Scalar(Rational(1, 2))}}), e(0));
    EXPECT_EQ(linKaltonEval(finite({e(0, Scalar::sqrtOf(2))}), {{0, Scalar::sqrtOf(2)}}), e(0, Scalar(2)));
}

TEST(LinKaltonEval, AgreesOnIntegerTuples) {
    testing::Gen gen(307);
    const Family f{{SparseVector{{0, Scalar(Rational(1, 3))}, {2, Scalar::sqrtOf(3)}}, e(1, Scalar(-2))},
                   TailSpec{e(2), 3, Rational(2), Rational(-1, 2)}};
    for (int trial = 0; trial < 100; ++trial) {
        IntTuple z;
        ScalarTuple r;
        for (int k = 0; k < 4; ++k) {
            const auto i = static_cast<std::size_t>(gen.integer(0, 8));
            const long v = gen.integer(-9, 9);
            if (v == 0) continue;
            z[i] = v;
            r[i] = Scalar(v);
        }
        EXPECT_EQ(linKaltonEval(f, r), kaltonEval(f, z));
    }
}

TEST(KaltonEval, HomomorphismLaw) {
    testing::Gen gen(311);
    const Family f{{e(0, Scalar(Rational(5, 2))), SparseVector{{0, Scalar(1)}, {1, Scalar(-1)}}},
                   TailSpec{e(1), 2, Rational(1), Rational(3)}};
    for (int trial = 0; trial < 500; ++trial) {
        IntTuple z, w, sum;
        for (int k = 0; k < 3; ++k) {
            z[static_cast<std::size_t>(gen.integer(0, 6))] = gen.integer(-20, 20);
            w[static_cast<std::size_t>(gen.integer(0, 6))] = gen.integer(-20, 20);
        }
        sum = z;
        for (const auto& [i, v] : w) sum[i] += v;
        EXPECT_EQ(kaltonEval(f, sum), kaltonEval(f, z) + kaltonEval(f, w));
    }
}

TEST(Continuity, Examples) {
    const ContinuityResult tail = isKaltonContinuous(unitTail(), AmbientSpace::product());
    EXPECT_TRUE(tail.continuous);
    EXPECT_FALSE(tail.schedule.empty());
    for (const auto& step : tail.schedule) EXPECT_EQ(step.f.size(), step.v.coords.size());

    const Family polluted{{e(1)}, TailSpec{e(0), 2, Rational(1), Rational(1)}};
    const ContinuityResult bad = isKaltonContinuous(polluted, AmbientSpace::product());
    EXPECT_FALSE(bad.continuous);
    EXPECT_EQ(bad.counterexample, BasicNbhd({0}, Rational(1)));

    EXPECT_TRUE(isKaltonContinuous(finite({e(0), e(1, Scalar(4))}), AmbientSpace::euclidean(2)).continuous);
}

// |r_a| < eta on F maps into V: checked on random coefficient tuples.
TEST(Continuity, DomainRadiusMapsIntoV) {
    testing::Gen gen(313);
    const Family f{{SparseVector{{0, Scalar(3)}, {1, Scalar(-7)}}}, TailSpec{{}, 2, Rational(5), Rational(2)}};
    const ContinuityResult r = isKaltonContinuous(f, AmbientSpace::product());
    ASSERT_TRUE(r.continuous);
    for (const auto& step : r.schedule) {
        for (int trial = 0; trial < 20; ++trial) {
            ScalarTuple t;
            for (std::size_t i : step.f) t[i] = Scalar(step.eta * Rational(gen.integer(-99, 99), 100));
            for (int k = 0; k < 3; ++k) t[10 + static_cast<std::size_t>(gen.integer(0, 20))] = Scalar(gen.rational());
            EXPECT_EQ(inNbhd(linKaltonEval(f, t), step.v), Membership::In);
        }
    }
}

TEST(OpenInjection, Examples) {
    const OpenInjectionResult units = isLinKaltonOpenInjection(finite({e(0), e(1)}), AmbientSpace::euclidean(2));
    ASSERT_TRUE(units.openInjection);
    for (const auto& b : units.bounds) EXPECT_EQ(b.k, 1);
    EXPECT_FALSE(isLinKaltonOpenInjection(finite({e(0), e(0, Scalar(2))}), AmbientSpace::euclidean(1)).openInjection);
    EXPECT_FALSE(isLinKaltonOpenInjection(finite({e(0), e(0, Scalar::sqrtOf(2))}), AmbientSpace::euclidean(1))
                     .openInjection);
}

TEST(OpenInjection, CoordinateBoundsHold) {
    testing::Gen gen(317);
    const Family f{{SparseVector{{0, Scalar(1)}, {1, Scalar(2)}}, SparseVector{{0, Scalar::sqrtOf(5)}, {1, Scalar(-1)}}},
                   TailSpec{{}, 2, Rational(1, 3), Rational(3)}};
    const OpenInjectionResult r = isLinKaltonOpenInjection(f, AmbientSpace::product());
    ASSERT_TRUE(r.openInjection);
    for (const auto& b : r.bounds) {
        CoordSet supp;
        for (const auto& [c, y] : b.functional) supp.insert(c);
        for (int trial = 0; trial < 50; ++trial) {
            ScalarTuple t;
            for (std::size_t i = 0; i < 6; ++i) t[i] = Scalar(gen.rational());
            const SparseVector x = linKaltonEval(f, t);
            const Scalar lhs = abs(t.count(b.a) ? t[b.a] : Scalar());
            const Scalar rhs = seminorm(x, supp).scaledBy(b.k);
            EXPECT_NE(compare(lhs, rhs, Rational(1, 1000000)), Ordering::Greater);
        }
    }
}

TEST(Embedding, UnitTail) {
    const EmbeddingReport r = embeddingReport(unitTail(), AmbientSpace::product());
    EXPECT_EQ(r.kalEmbedding, Verdict::Yes);
    EXPECT_EQ(r.lkalEmbedding, Verdict::Yes);
}

TEST(Embedding, OneAndRootTwo) {
    const EmbeddingReport r = embeddingReport(finite({e(0), e(0, Scalar::sqrtOf(2))}), AmbientSpace::euclidean(1));
    EXPECT_EQ(r.injective, Verdict::Yes);
    EXPECT_EQ(r.openOntoImage, Verdict::No);
    EXPECT_EQ(r.linOpenInjection, Verdict::No);
    EXPECT_EQ(r.kalEmbedding, Verdict::No);
    EXPECT_EQ(r.lkalEmbedding, Verdict::No);
}

TEST(Embedding, RationalBasisIsDiscrete) {
    const Family f = finite({SparseVector{{0, Scalar(Rational(1, 2))}, {1, Scalar(3)}}, e(1, Scalar(Rational(-2, 3)))});
    const EmbeddingReport r = embeddingReport(f, AmbientSpace::euclidean(2));
    ASSERT_EQ(r.kalEmbedding, Verdict::Yes);
    ASSERT_EQ(r.lkalEmbedding, Verdict::Yes);
    ASSERT_TRUE(r.pivots.has_value());
    const Rational floor = WitnessSchema{f}.discretenessBound();
    std::optional<Scalar> least;
    for (long z0 = -25; z0 <= 25; ++z0) {
        for (long z1 = -25; z1 <= 25; ++z1) {
            if (z0 == 0 && z1 == 0) continue;
            const Scalar s = seminorm(kaltonEval(f, {{0, Integer(z0)}, {1, Integer(z1)}}), {0, 1});
            if (!least || compare(s, *least, Rational(1, 1000000)) == Ordering::Less) least = s;
        }
    }
    EXPECT_NE(compare(*least, Scalar(floor), Rational(1, 1000000)), Ordering::Less);
}

// Dual computations and the kal/lkal equivalence over every profile.
TEST(Embedding, GeneratedInstancesAgree) {
    for (std::uint64_t i = 0; i < 400; ++i) {
        const Profile p = sweepProfile(41, i);
        const Instance inst = generateInstance(41 + i, p);
        EmbeddingReport r;
        ASSERT_NO_THROW(r = embeddingReport(inst.family, inst.space)) << toString(p.kind) << " " << i;
        EXPECT_EQ(r.kalEmbedding, r.lkalEmbedding);
        EXPECT_EQ(r.continuous == Verdict::Yes, isAbsolutelyCauchySummable(inst.family, inst.space).summable);
    }
}

}  // namespace
}  // namespace kalspan
