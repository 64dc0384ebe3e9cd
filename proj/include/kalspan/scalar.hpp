#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "kalspan/errors.hpp"

namespace kalspan {

using Integer = mpz_class;
using Rational = mpq_class;

/// Highest dyadic refinement level any interval oracle is asked for (widths down to 2^-4096).
inline constexpr unsigned kDefaultMaxLevel = 4096;

inline Rational makeRational(const Integer& num, const Integer& den) {
    if (den == 0) throw PreconditionViolation("zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline Integer floorOf(const Rational& q) {
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline Integer ceilOf(const Rational& q) {
    Integer r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline std::string toString(const Rational& q) { return q.get_str(); }

/// Parses "p/q" or "p" (optional leading '-'); the result is canonical.
inline Rational parseRational(std::string_view text) {
    auto digits = [](std::string_view s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    std::string_view body = text;
    if (!body.empty() && body.front() == '-') body.remove_prefix(1);
    const auto slash = body.find('/');
    const std::string_view num = body.substr(0, slash);
    const std::string_view den = slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
    if (!digits(num) || !digits(den)) {
        throw InputError("", "malformed rational \"" + std::string(text) + "\"");
    }
    const Integer d(std::string(den), 10);
    if (d == 0) throw InputError("", "zero denominator in \"" + std::string(text) + "\"");
    Integer n(std::string(num), 10);
    if (text.front() == '-') n = -n;
    return makeRational(n, d);
}

/// Smallest b with |x| < 2^b.
inline unsigned bitsAbove(const Rational& x) {
    const Integer c = ceilOf(abs(x));
    if (c == 0) return 0;
    return static_cast<unsigned>(mpz_sizeinbase(c.get_mpz_t(), 2));
}

inline Rational dyadic(unsigned level) {
    Integer den = 1;
    den <<= level;
    return makeRational(1, den);
}

/// Closed rational interval [lo, hi].
struct Interval {
    Rational lo;
    Rational hi;

    Rational width() const { return hi - lo; }
    bool contains(const Rational& x) const { return lo <= x && x <= hi; }
    bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
    Rational magnitude() const { return std::max(Rational(abs(lo)), Rational(abs(hi))); }
};

inline Interval operator+(const Interval& x, const Interval& y) { return {x.lo + y.lo, x.hi + y.hi}; }
inline Interval operator-(const Interval& x) { return {-x.hi, -x.lo}; }

inline Interval operator*(const Interval& x, const Interval& y) {
    const Rational p[4] = {x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi};
    return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

inline Interval scaled(const Interval& x, const Rational& q) {
    return q >= 0 ? Interval{x.lo * q, x.hi * q} : Interval{x.hi * q, x.lo * q};
}

inline Interval absOf(const Interval& x) {
    if (x.lo >= 0) return x;
    if (x.hi <= 0) return -x;
    return {Rational(0), std::max(Rational(-x.lo), x.hi)};
}

inline Interval maxOf(const Interval& x, const Interval& y) {
    return {std::max(x.lo, y.lo), std::max(x.hi, y.hi)};
}

/// Enclosure of sqrt(n) at level k: lower end s/2^k from the integer square root, upper end the
/// smaller of (s+1)/2^k and the Newton iterate (lo + n/lo)/2 >= sqrt(n). Both ends move
/// monotonically with k, so successive levels are nested. Degenerate when n is a perfect square.
inline Interval sqrtEnclosure(const Integer& n, unsigned k) {
    if (n < 0) throw PreconditionViolation("square root of a negative integer");
    Integer scaledN = n;
    scaledN <<= 2 * k;
    Integer s;
    mpz_sqrt(s.get_mpz_t(), scaledN.get_mpz_t());
    Integer den = 1;
    den <<= k;
    const Rational lo = makeRational(s, den);
    if (s * s == scaledN) return {lo, lo};
    Rational hi = makeRational(s + 1, den);
    if (lo > 0) {
        const Rational newton = (lo + Rational(n) / lo) / 2;
        if (newton < hi) hi = newton;
    }
    return {lo, hi};
}

inline bool isSquareFree(long n) {
    if (n < 2) return false;
    for (long p = 2; p * p <= n; ++p) {
        if (n % (p * p) == 0) return false;
    }
    return true;
}

/// Exact element a + b*sqrt(n) of the quadratic field Q(sqrt(n)), n square-free.
class QuadExt {
public:
    QuadExt(Rational a, Rational b, long radicand) : a_(std::move(a)), b_(std::move(b)), radicand_(radicand) {
        if (!isSquareFree(radicand_)) {
            throw PreconditionViolation("radicand " + std::to_string(radicand_) + " is not square-free");
        }
    }

    const Rational& a() const { return a_; }
    const Rational& b() const { return b_; }
    long radicand() const { return radicand_; }

    // Decides the sign of a + b*sqrt(n) by comparing a^2 with b^2*n when the parts disagree.
    int sign() const {
        const int sa = sgn(a_);
        const int sb = sgn(b_);
        if (sb == 0) return sa;
        if (sa == 0 || sa == sb) return sb;
        return a_ * a_ > b_ * b_ * radicand_ ? sa : sb;
    }

    QuadExt conjugate() const { return {a_, -b_, radicand_}; }
    Rational norm() const { return a_ * a_ - b_ * b_ * radicand_; }

    QuadExt inverse() const {
        const Rational nrm = norm();
        if (nrm == 0) throw PreconditionViolation("inverse of zero");
        return {a_ / nrm, -b_ / nrm, radicand_};
    }

    /// Enclosure of width < 2^-level.
    Interval enclose(unsigned level) const {
        if (b_ == 0) return {a_, a_};
        const Interval root = sqrtEnclosure(radicand_, level + bitsAbove(b_));
        return Interval{a_, a_} + scaled(root, b_);
    }

    friend bool operator==(const QuadExt& x, const QuadExt& y) {
        return x.radicand_ == y.radicand_ && x.a_ == y.a_ && x.b_ == y.b_;
    }

    friend QuadExt operator+(const QuadExt& x, const QuadExt& y) {
        check(x, y);
        return {x.a_ + y.a_, x.b_ + y.b_, x.radicand_};
    }
    friend QuadExt operator-(const QuadExt& x, const QuadExt& y) {
        check(x, y);
        return {x.a_ - y.a_, x.b_ - y.b_, x.radicand_};
    }
    friend QuadExt operator*(const QuadExt& x, const QuadExt& y) {
        check(x, y);
        return {x.a_ * y.a_ + x.b_ * y.b_ * x.radicand_, x.a_ * y.b_ + x.b_ * y.a_, x.radicand_};
    }
    QuadExt operator-() const { return {-a_, -b_, radicand_}; }

private:
    static void check(const QuadExt& x, const QuadExt& y) {
        if (x.radicand_ != y.radicand_) {
            throw RadicandMismatch("radicands " + std::to_string(x.radicand_) + " and " +
                                   std::to_string(y.radicand_));
        }
    }

    Rational a_;
    Rational b_;
    long radicand_;
};

/// Name of an interval constant that can be serialized and rebuilt.
struct NamedConstant {
    std::string kind;  // currently only "sqrt"
    long arg = 0;

    friend bool operator==(const NamedConstant&, const NamedConstant&) = default;
};

/// A real constant known through nested rational enclosures.
///
/// Enclosures are indexed by a dyadic level L: enclose(L) has width < 2^-L (or <= for leaves
/// that are exact dyadic grids) and enclose(L+1) lies inside enclose(L). Arithmetic nodes pick
/// operand levels as a fixed monotone function of L, so composition keeps the nesting.
class IntervalConst {
public:
    struct Node {
        virtual ~Node() = default;
        virtual Interval enclose(unsigned level) const = 0;
    };

    explicit IntervalConst(std::shared_ptr<const Node> node, std::optional<NamedConstant> name = std::nullopt)
        : node_(std::move(node)), name_(std::move(name)) {}

    static IntervalConst sqrtOf(long n);
    static IntervalConst exact(const Rational& q);
    static IntervalConst exact(const QuadExt& x);
    /// Wraps a user oracle mapping a level to an enclosure; nesting is the oracle's contract.
    static IntervalConst fromOracle(std::function<Interval(unsigned)> oracle);

    Interval enclose(unsigned level) const { return node_->enclose(level); }

    /// Interval of width <= `width` containing the constant.
    Interval refine(const Rational& width, unsigned maxLevel = kDefaultMaxLevel) const {
        if (width <= 0) throw PreconditionViolation("refinement width must be positive");
        unsigned level = 0;
        while (dyadic(level) > width) {
            if (++level > maxLevel) {
                throw OracleFailure("width " + toString(width) + " needs more than " + std::to_string(maxLevel) +
                                    " refinement levels");
            }
        }
        return enclose(level);
    }

    const std::optional<NamedConstant>& name() const { return name_; }
    const Node* node() const { return node_.get(); }
    std::shared_ptr<const Node> sharedNode() const { return node_; }

private:
    std::shared_ptr<const Node> node_;
    std::optional<NamedConstant> name_;
};

namespace detail {

struct ExactNode final : IntervalConst::Node {
    explicit ExactNode(Rational q) : value(std::move(q)) {}
    Interval enclose(unsigned) const override { return {value, value}; }
    Rational value;
};

struct QuadNode final : IntervalConst::Node {
    explicit QuadNode(QuadExt q) : value(std::move(q)) {}
    Interval enclose(unsigned level) const override { return value.enclose(level); }
    QuadExt value;
};

struct SqrtNode final : IntervalConst::Node {
    explicit SqrtNode(long n) : arg(n) {}
    Interval enclose(unsigned level) const override { return sqrtEnclosure(arg, level); }
    long arg;
};

struct OracleNode final : IntervalConst::Node {
    explicit OracleNode(std::function<Interval(unsigned)> f) : oracle(std::move(f)) {}
    Interval enclose(unsigned level) const override { return oracle(level); }
    std::function<Interval(unsigned)> oracle;
};

struct SumNode final : IntervalConst::Node {
    SumNode(IntervalConst x, IntervalConst y) : lhs(std::move(x)), rhs(std::move(y)) {}
    Interval enclose(unsigned level) const override { return lhs.enclose(level + 1) + rhs.enclose(level + 1); }
    IntervalConst lhs;
    IntervalConst rhs;
};

struct ProductNode final : IntervalConst::Node {
    ProductNode(IntervalConst x, IntervalConst y) : lhs(std::move(x)), rhs(std::move(y)) {
        // |x| and |y| stay below the level-0 magnitudes at every finer level.
        extra = 2 + std::max(bitsAbove(lhs.enclose(0).magnitude()), bitsAbove(rhs.enclose(0).magnitude()));
    }
    Interval enclose(unsigned level) const override {
        return lhs.enclose(level + extra) * rhs.enclose(level + extra);
    }
    IntervalConst lhs;
    IntervalConst rhs;
    unsigned extra = 0;
};

struct ScaleNode final : IntervalConst::Node {
    ScaleNode(IntervalConst x, Rational q) : inner(std::move(x)), factor(std::move(q)) {}
    Interval enclose(unsigned level) const override {
        return scaled(inner.enclose(level + bitsAbove(factor)), factor);
    }
    IntervalConst inner;
    Rational factor;
};

struct AbsNode final : IntervalConst::Node {
    explicit AbsNode(IntervalConst x) : inner(std::move(x)) {}
    Interval enclose(unsigned level) const override { return absOf(inner.enclose(level)); }
    IntervalConst inner;
};

struct MaxNode final : IntervalConst::Node {
    MaxNode(IntervalConst x, IntervalConst y) : lhs(std::move(x)), rhs(std::move(y)) {}
    Interval enclose(unsigned level) const override { return maxOf(lhs.enclose(level), rhs.enclose(level)); }
    IntervalConst lhs;
    IntervalConst rhs;
};

}  // namespace detail

inline IntervalConst IntervalConst::sqrtOf(long n) {
    if (n < 0) throw PreconditionViolation("sqrt of a negative integer");
    return IntervalConst(std::make_shared<detail::SqrtNode>(n), NamedConstant{"sqrt", n});
}

inline IntervalConst IntervalConst::exact(const Rational& q) {
    return IntervalConst(std::make_shared<detail::ExactNode>(q));
}

inline IntervalConst IntervalConst::exact(const QuadExt& x) {
    return IntervalConst(std::make_shared<detail::QuadNode>(x));
}

inline IntervalConst IntervalConst::fromOracle(std::function<Interval(unsigned)> oracle) {
    return IntervalConst(std::make_shared<detail::OracleNode>(std::move(oracle)));
}

enum class Ordering { Less, Greater, Equal, Undecided };

inline const char* toString(Ordering o) {
    switch (o) {
        case Ordering::Less: return "LT";
        case Ordering::Greater: return "GT";
        case Ordering::Equal: return "EQ";
        case Ordering::Undecided: return "UNDECIDED";
    }
    return "?";
}

/// A real quantity: exact rational, exact quadratic-field element, or interval constant.
///
/// Exact arithmetic stays exact; anything touching an interval constant degrades to an
/// interval constant. QuadExt values with zero irrational part are stored as rationals.
class Scalar {
public:
    using Value = std::variant<Rational, QuadExt, IntervalConst>;

    Scalar() : value_(Rational(0)) {}
    Scalar(Rational q) : value_(std::move(q)) {}  // NOLINT(google-explicit-constructor)
    Scalar(long n) : value_(Rational(n)) {}       // NOLINT(google-explicit-constructor)
    Scalar(int n) : value_(Rational(n)) {}        // NOLINT(google-explicit-constructor)
    Scalar(QuadExt q) {                           // NOLINT(google-explicit-constructor)
        if (q.b() == 0) {
            value_ = q.a();
        } else {
            value_ = std::move(q);
        }
    }
    Scalar(IntervalConst c) : value_(std::move(c)) {}  // NOLINT(google-explicit-constructor)

    static Scalar sqrtOf(long n) {
        if (n >= 0) {
            Integer root;
            const Integer big = n;
            if (mpz_perfect_square_p(big.get_mpz_t())) {
                mpz_sqrt(root.get_mpz_t(), big.get_mpz_t());
                return Rational(root);
            }
            long squarePart = 1;
            long rest = n;
            for (long p = 2; p * p <= rest; ++p) {
                while (rest % (p * p) == 0) {
                    rest /= p * p;
                    squarePart *= p;
                }
            }
            return QuadExt(0, squarePart, rest);
        }
        throw PreconditionViolation("sqrt of a negative integer");
    }

    const Value& value() const { return value_; }
    bool isRational() const { return std::holds_alternative<Rational>(value_); }
    bool isQuad() const { return std::holds_alternative<QuadExt>(value_); }
    bool isInterval() const { return std::holds_alternative<IntervalConst>(value_); }
    bool isExact() const { return !isInterval(); }

    const Rational& rational() const { return std::get<Rational>(value_); }
    const QuadExt& quad() const { return std::get<QuadExt>(value_); }
    const IntervalConst& interval() const { return std::get<IntervalConst>(value_); }

    std::optional<long> radicand() const {
        if (isQuad()) return quad().radicand();
        return std::nullopt;
    }

    Interval enclose(unsigned level) const {
        return std::visit(
            [&](const auto& v) -> Interval {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, Rational>) {
                    return {v, v};
                } else {
                    return v.enclose(level);
                }
            },
            value_);
    }

    Interval refine(const Rational& width, unsigned maxLevel = kDefaultMaxLevel) const {
        if (width <= 0) throw PreconditionViolation("refinement width must be positive");
        if (isRational()) return {rational(), rational()};
        return toIntervalConst().refine(width, maxLevel);
    }

    IntervalConst toIntervalConst() const {
        if (isRational()) return IntervalConst::exact(rational());
        if (isQuad()) return IntervalConst::exact(quad());
        return interval();
    }

    /// Exact sign; throws InexactEntries for interval constants.
    int exactSign() const {
        if (isRational()) return sgn(rational());
        if (isQuad()) return quad().sign();
        throw InexactEntries("sign of an interval constant is not exactly decidable");
    }

    /// True only when the value is certainly zero.
    bool isZero() const {
        if (isRational()) return rational() == 0;
        if (isQuad()) return false;
        const Interval box = enclose(0);
        return box.lo == 0 && box.hi == 0;
    }

    friend bool operator==(const Scalar& x, const Scalar& y) {
        if (x.isInterval() || y.isInterval()) {
            return x.isInterval() && y.isInterval() && x.interval().node() == y.interval().node();
        }
        if (x.isRational() && y.isRational()) return x.rational() == y.rational();
        if (x.isQuad() && y.isQuad()) return x.quad() == y.quad();
        return false;  // normalized: a rational never equals an element with nonzero sqrt part
    }

    friend Scalar operator+(const Scalar& x, const Scalar& y) {
        if (x.isRational() && y.isRational()) return Scalar(x.rational() + y.rational());
        if (x.isExact() && y.isExact()) return Scalar(x.asQuad(y) + y.asQuad(x));
        return Scalar(IntervalConst(std::make_shared<detail::SumNode>(x.toIntervalConst(), y.toIntervalConst())));
    }

    friend Scalar operator*(const Scalar& x, const Scalar& y) {
        if (x.isRational() && y.isRational()) return Scalar(x.rational() * y.rational());
        if (x.isRational()) return y.scaledBy(x.rational());
        if (y.isRational()) return x.scaledBy(y.rational());
        if (x.isExact() && y.isExact()) return Scalar(x.quad() * y.quad());
        return Scalar(
            IntervalConst(std::make_shared<detail::ProductNode>(x.toIntervalConst(), y.toIntervalConst())));
    }

    Scalar operator-() const { return scaledBy(Rational(-1)); }
    friend Scalar operator-(const Scalar& x, const Scalar& y) { return x + (-y); }

    /// Exact division; interval constants are not invertible here.
    friend Scalar operator/(const Scalar& x, const Scalar& y) {
        if (!x.isExact() || !y.isExact()) throw InexactEntries("division requires exact scalars");
        if (y.isRational()) {
            if (y.rational() == 0) throw PreconditionViolation("division by zero");
            return x.scaledBy(1 / y.rational());
        }
        const QuadExt inv = y.quad().inverse();
        if (x.isRational()) return Scalar(QuadExt(inv.a() * x.rational(), inv.b() * x.rational(), inv.radicand()));
        return Scalar(x.quad() * inv);
    }

    Scalar scaledBy(const Rational& q) const {
        if (isRational()) return Scalar(rational() * q);
        if (isQuad()) return Scalar(QuadExt(quad().a() * q, quad().b() * q, quad().radicand()));
        if (q == 0) return Scalar(Rational(0));
        return Scalar(IntervalConst(std::make_shared<detail::ScaleNode>(interval(), q)));
    }

private:
    QuadExt asQuad(const Scalar& partner) const {
        if (isQuad()) return quad();
        return QuadExt(rational(), 0, partner.quad().radicand());
    }

    Value value_;
};

inline Scalar abs(const Scalar& x) {
    if (x.isExact()) return x.exactSign() < 0 ? -x : x;
    return Scalar(IntervalConst(std::make_shared<detail::AbsNode>(x.interval())));
}

inline Scalar max(const Scalar& x, const Scalar& y) {
    if (x.isExact() && y.isExact()) return (x - y).exactSign() >= 0 ? x : y;
    return Scalar(IntervalConst(std::make_shared<detail::MaxNode>(x.toIntervalConst(), y.toIntervalConst())));
}

/// Certified comparison. Exact inputs are always decided; for interval inputs the difference is
/// refined to width gap/2, so UNDECIDED certifies |x - y| < gap.
inline Ordering compare(const Scalar& x, const Scalar& y, const Rational& gap) {
    if (gap <= 0) throw PreconditionViolation("comparison gap must be positive");
    const Scalar d = x - y;
    if (d.isExact()) {
        const int s = d.exactSign();
        return s < 0 ? Ordering::Less : (s > 0 ? Ordering::Greater : Ordering::Equal);
    }
    Interval box;
    try {
        box = d.refine(gap / 2);
    } catch (const OracleFailure&) {
        return Ordering::Undecided;
    }
    if (box.lo > 0) return Ordering::Greater;
    if (box.hi < 0) return Ordering::Less;
    return Ordering::Undecided;
}

/// Rational upper bound of x, within `slack` of the true value.
inline Rational upperBound(const Scalar& x, const Rational& slack) {
    if (x.isRational()) return x.rational();
    return x.refine(slack).hi;
}

inline Rational lowerBound(const Scalar& x, const Rational& slack) {
    if (x.isRational()) return x.rational();
    return x.refine(slack).lo;
}

}  // namespace kalspan
