#include <gtest/gtest.h>

#include "kalspan/space.hpp"
#include "test_support.hpp"

namespace kalspan {
namespace {

SparseVector threeMinusTwo() { return SparseVector{{0, Scalar(3)}, {5, Scalar(-2)}}; }

TEST(SparseVector, DropsZeroEntries) {
    SparseVector v{{0, Scalar(1)}, {3, Scalar(0)}};
    EXPECT_EQ(v.support(), CoordSet{0});
    v -= SparseVector::unit(0);
    EXPECT_TRUE(v.isZero());
    EXPECT_EQ(v, SparseVector());
}

TEST(Seminorm, MaxOverSelectedCoordinates) {
    const Scalar s = seminorm(threeMinusTwo(), {0, 5});
    ASSERT_TRUE(s.isRational());
    EXPECT_EQ(s.rational(), 3);
    EXPECT_TRUE(seminorm(threeMinusTwo(), {7}).isZero());
    const Scalar r = seminorm(SparseVector::unit(1, Scalar::sqrtOf(2)), {1});
    ASSERT_TRUE(r.isQuad());
    EXPECT_EQ(r, Scalar::sqrtOf(2));
}

TEST(InNbhd, StrictMembership) {
    const BasicNbhd v({0}, Rational(1));
    EXPECT_EQ(inNbhd(SparseVector::unit(0, Scalar(Rational(1, 2))), v), Membership::In);
    EXPECT_EQ(inNbhd(SparseVector::unit(0), v), Membership::Out);
    EXPECT_EQ(inNbhd(SparseVector::unit(0, Scalar(-2)), v), Membership::Out);
}

TEST(InNbhd, IntervalEntryNeedsRefinement) {
    // sqrt(2) - 1.414 = 0.000213..., radius 1/1000 leaves slack 0.000786...
    const Scalar tiny = Scalar(IntervalConst::sqrtOf(2)) - Scalar(Rational(1414, 1000));
    const SparseVector x = SparseVector::unit(0, tiny);
    const BasicNbhd v({0}, Rational(1, 1000));
    EXPECT_EQ(inNbhd(x, v, Rational(1)), Membership::Undecided);
    EXPECT_EQ(inNbhd(x, v, Rational(1, 100000)), Membership::In);
}

TEST(Shrink, DividesTheRadius) {
    const BasicNbhd u({0, 1}, Rational(3, 4));
    EXPECT_EQ(shrink(u, 3), BasicNbhd({0, 1}, Rational(1, 4)));
    EXPECT_EQ(shrink(u, 1), u);
    EXPECT_THROW(shrink(u, 0), PreconditionViolation);
}

TEST(Shrink, KFoldSumsStayInside) {
    testing::Gen gen(17);
    for (unsigned k = 1; k <= 4; ++k) {
        const BasicNbhd u({0, 1, 2}, Rational(gen.integer(1, 9), gen.integer(1, 9)));
        const BasicNbhd v = shrink(u, k);
        for (int trial = 0; trial < 100; ++trial) {
            SparseVector sum;
            for (unsigned j = 0; j < k; ++j) {
                SparseVector x;
                for (Coord c : v.coords) {
                    // Uniform in the open box (-radius, radius).
                    const long steps = 1000;
                    x.set(c, Scalar(v.radius * Rational(gen.integer(-(steps - 1), steps - 1), steps)));
                }
                x.set(7, Scalar(gen.rational()));  // coordinates outside I are unconstrained
                ASSERT_EQ(inNbhd(x, v), Membership::In);
                sum += x;
            }
            EXPECT_EQ(inNbhd(sum, u), Membership::In);
        }
    }
}

TEST(BasicNbhd, IsBalanced) {
    testing::Gen gen(19);
    const BasicNbhd v({0, 2}, Rational(1, 2));
    for (int trial = 0; trial < 200; ++trial) {
        const SparseVector x{{0, Scalar(gen.rational(4, 9))}, {2, Scalar(gen.rational(4, 9))}};
        if (inNbhd(x, v) != Membership::In) continue;
        for (long num = -8; num <= 8; ++num) {
            const Scalar lambda(Rational(num, 8));
            EXPECT_EQ(inNbhd(lambda * x, v), Membership::In);
        }
    }
}

TEST(TorusReduce, RationalExamples) {
    const TorusReduction r = torusReduce({Scalar(Rational(7, 4)), Scalar(Rational(-3, 10)), Scalar(Rational(1, 2))});
    EXPECT_EQ(r.point.coords[0], Scalar(Rational(-1, 4)));
    EXPECT_EQ(r.shift[0], 2);
    EXPECT_EQ(r.point.coords[1], Scalar(Rational(-3, 10)));
    EXPECT_EQ(r.shift[1], 0);
    // Half-integers go to -1/2 with the integer rounded up.
    EXPECT_EQ(r.point.coords[2], Scalar(Rational(-1, 2)));
    EXPECT_EQ(r.shift[2], 1);
}

TEST(TorusReduce, SqrtTwo) {
    for (const Scalar& root : {Scalar::sqrtOf(2), Scalar(IntervalConst::sqrtOf(2))}) {
        const TorusReduction r = torusReduce({root});
        EXPECT_EQ(r.shift[0], 1);
        const Interval box = r.point.coords[0].refine(Rational(1, 10000));
        EXPECT_LE(box.width(), Rational(1, 10000));
        // Contains sqrt(2) - 1 exactly: (lo + 1)^2 <= 2 <= (hi + 1)^2.
        EXPECT_LE((box.lo + 1) * (box.lo + 1), 2);
        EXPECT_GE((box.hi + 1) * (box.hi + 1), 2);
        EXPECT_GE(box.lo, Rational(4141, 10000));
        EXPECT_LE(box.hi, Rational(4143, 10000));
    }
}

TEST(TorusReduce, IdempotentOnOutput) {
    testing::Gen gen(23);
    for (int i = 0; i < 300; ++i) {
        std::vector<Scalar> t;
        t.push_back(Scalar(gen.rational(50, 12)));
        t.push_back(Scalar(gen.quad(3, 10, 7)));
        const TorusReduction once = torusReduce(t);
        const TorusReduction twice = torusReduce(once.point.coords);
        for (std::size_t j = 0; j < t.size(); ++j) {
            EXPECT_EQ(twice.shift[j], 0);
            EXPECT_EQ(twice.point.coords[j], once.point.coords[j]);
            EXPECT_EQ(once.point.coords[j] + Scalar(Rational(once.shift[j])), t[j]);
            EXPECT_NE(compare(once.point.coords[j], Scalar(Rational(-1, 2)), Rational(1)), Ordering::Less);
            EXPECT_EQ(compare(once.point.coords[j], Scalar(Rational(1, 2)), Rational(1)), Ordering::Less);
        }
    }
}

TEST(AmbientSpace, EuclideanAdmitsOnlyLowCoordinates) {
    const AmbientSpace s = AmbientSpace::euclidean(2);
    EXPECT_TRUE(s.admits(SparseVector::unit(1)));
    EXPECT_FALSE(s.admits(SparseVector::unit(2)));
    EXPECT_TRUE(AmbientSpace::product().admits(SparseVector::unit(1000)));
}

}  // namespace
}  // namespace kalspan
