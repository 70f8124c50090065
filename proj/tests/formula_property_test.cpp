#include "support/fuzz.hpp"

#include "vrf/error.hpp"
#include "vrf/formula.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

using namespace vrf::formula;
using vrf::fixtures::pick;
using vrf::fixtures::uniform;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t n) {
    Matrix m(n, n);
    for (auto& x : m.data()) x = uniform(rng, -1.0, 1.0);
    // Diagonal dominance keeps the condition number modest.
    for (std::size_t i = 0; i < n; ++i) m(i, i) += static_cast<double>(n);
    return m;
}

}  // namespace

TEST(Property, PrintParseRoundTrip) {
    std::mt19937_64 rng(11);
    int checked = 0;
    for (int k = 0; k < 2000; ++k) {
        const Expr e = vrf::fixtures::random_typed_expr(rng, 5);
        const std::string text = to_string(e);
        try {
            const Expr back = parse(text);
            EXPECT_EQ(back, e) << text << " reparsed as " << to_string(back);
        } catch (const vrf::ParseError& err) {
            ADD_FAILURE() << text << ": " << err.what();
        }
        ++checked;
    }
    EXPECT_EQ(checked, 2000);
}

TEST(Property, BroadcastIsComponentwise) {
    std::mt19937_64 rng(12);
    int compared = 0;
    for (int k = 0; k < 3000; ++k) {
        const Expr e = vrf::fixtures::random_componentwise_expr(rng, 4);
        const std::size_t n = 1 + pick(rng, 5);
        Vector v(n), w(n);
        for (auto& x : v) x = uniform(rng, -3.0, 3.0);
        for (auto& x : w) x = uniform(rng, -3.0, 3.0);
        const auto outcome = vrf::fixtures::check_componentwise(e, v, w, uniform(rng, -3.0, 3.0));
        EXPECT_TRUE(outcome.ok) << outcome.detail;
        compared += outcome.checked;
    }
    EXPECT_GT(compared, 1500);
}

TEST(Property, InverseIsRightInverse) {
    std::mt19937_64 rng(13);
    for (std::size_t n = 1; n <= 5; ++n) {
        for (int k = 0; k < 50; ++k) {
            const Matrix m = random_matrix(rng, n);
            const Matrix p = multiply(m, inverse(m));
            double worst = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, std::abs(p(i, j) - (i == j ? 1.0 : 0.0)));
            EXPECT_LT(worst, 1e-9) << "n=" << n;
        }
    }
}

TEST(Property, TransposeIsInvolution) {
    std::mt19937_64 rng(14);
    for (int k = 0; k < 200; ++k) {
        const std::size_t r = 1 + pick(rng, 5), c = 1 + pick(rng, 5);
        Matrix m(r, c);
        for (auto& x : m.data()) x = uniform(rng, -10.0, 10.0);
        EXPECT_EQ(transpose(transpose(m)), m);
        Env env;
        env.set("m", m);
        EXPECT_EQ(eval(parse("m''"), env), Value(m));
    }
}

TEST(Property, CompositionIsExact) {
    std::mt19937_64 rng(15);
    const FunctionRef h = eval(parse("sin(sqr)"), {}).as<FunctionRef>();
    for (int k = 0; k < 1000; ++k) {
        const double x = uniform(rng, -10.0, 10.0);
        const double arg[] = {x};
        EXPECT_EQ(h.at(arg), std::sin(x * x)) << "x=" << x;
    }
}

TEST(Property, CrossIsAntisymmetric) {
    std::mt19937_64 rng(16);
    for (int k = 0; k < 500; ++k) {
        Env env;
        Vector a(3), b(3);
        for (auto& x : a) x = uniform(rng, -5.0, 5.0);
        for (auto& x : b) x = uniform(rng, -5.0, 5.0);
        env.set("a", a);
        env.set("b", b);
        EXPECT_EQ(eval(parse("cross(a, b) + cross(b, a)"), env), Value(Vector{0, 0, 0}));
        const Vector c = eval(parse("cross(a, b)"), env).as<Vector>();
        EXPECT_NEAR(c[0] * a[0] + c[1] * a[1] + c[2] * a[2], 0.0, 1e-12);
    }
}

TEST(Property, InferredTypeAdmitsValue) {
    std::mt19937_64 rng(17);
    int well_typed = 0, evaluated = 0;
    for (int k = 0; k < 10000; ++k) {
        const Env env = vrf::fixtures::typed_env(rng);
        const Expr e = vrf::fixtures::random_typed_expr(rng, 5);
        std::optional<TypeTag> inferred;
        try {
            inferred = infer(e, env.types());
        } catch (const vrf::TypeError&) {
            continue;
        }
        const TypeTag tag = *inferred;
        ++well_typed;
        try {
            const Value v = eval(e, env);
            ++evaluated;
            EXPECT_TRUE(tag.admits(v)) << to_string(e) << " : " << to_string(tag) << " produced " << to_string(v);
        } catch (const vrf::TypeError& err) {
            ADD_FAILURE() << "well-typed " << to_string(e) << " : " << to_string(tag) << " raised " << err.what();
        } catch (const vrf::Error&) {
            // Value-dependent failures are allowed.
        }
    }
    EXPECT_GT(well_typed, 1000);
    EXPECT_GT(evaluated, 500);
}
