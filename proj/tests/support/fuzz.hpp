#pragma once

// Random expression generators shared by the property tests and the
// acceptance suite.

#include "vrf/error.hpp"
#include "vrf/formula.hpp"

#include <bit>
#include <cstdint>
#include <iterator>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace vrf::fixtures {

using namespace vrf::formula;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// One variable per shape, all dimensions concrete.
inline Env typed_env(std::mt19937_64& rng) {
    Env env;
    auto vec = [&](std::size_t n) {
        Vector v(n);
        for (auto& x : v) x = uniform(rng, -2.0, 2.0);
        return v;
    };
    auto mat = [&](std::size_t r, std::size_t c) {
        Matrix m(r, c);
        for (auto& x : m.data()) x = uniform(rng, -2.0, 2.0);
        return m;
    };
    env.set("s", uniform(rng, -2.0, 2.0));
    env.set("r", uniform(rng, 0.1, 3.0));
    env.set("i", static_cast<std::int64_t>(pick(rng, 7)) - 3);
    env.set("b", pick(rng, 2) == 0);
    env.set("u", vec(3));
    env.set("w", vec(3));
    env.set("p", vec(2));
    env.set("A", mat(2, 3));
    env.set("B", mat(3, 3));
    env.set("C", mat(2, 2));
    env.set("g", FunctionRef::builtin("sqr"));
    return env;
}

/// Any-shape random expression over the variables of typed_env(). Most
/// results fail to type-check; callers filter with infer().
inline Expr random_typed_expr(std::mt19937_64& rng, int depth) {
    static const char* vars[] = {"s", "r", "i", "b", "u", "w", "p", "A", "B", "C", "g", "sin", "max"};
    static const char* unary_fns[] = {"sin", "cos", "exp", "abs", "sqr", "sqrt", "floor", "sign", "atan"};
    static const char* binary_fns[] = {"min", "max", "atan2"};
    if (depth <= 0 || pick(rng, 4) == 0) {
        switch (pick(rng, 4)) {
        case 0: return Expr::literal(Value(static_cast<std::int64_t>(pick(rng, 5))));
        case 1: return Expr::literal(Value(uniform(rng, 0.0, 3.0)));
        default: return Expr::variable(vars[pick(rng, std::size(vars))]);
        }
    }
    auto sub = [&] { return random_typed_expr(rng, depth - 1); };
    switch (pick(rng, 10)) {
    case 0: return Expr::unary(UnaryOp::Negate, sub());
    case 1: return Expr::unary(pick(rng, 2) ? UnaryOp::Transpose : UnaryOp::Inverse, sub());
    case 2: return Expr::unary(UnaryOp::Not, sub());
    case 3:
    case 4:
    case 5: {
        static const BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Pow,
                                       BinaryOp::Lt,  BinaryOp::Eq,  BinaryOp::And, BinaryOp::Mul, BinaryOp::Add};
        return Expr::binary(ops[pick(rng, std::size(ops))], sub(), sub());
    }
    case 6: return Expr::call(unary_fns[pick(rng, std::size(unary_fns))], {sub()});
    case 7: return Expr::call(binary_fns[pick(rng, std::size(binary_fns))], {sub(), sub()});
    case 8: return pick(rng, 2) ? Expr::call("cross", {sub(), sub()}) : Expr::delta(sub());
    default: {
        std::vector<Expr> el;
        const std::size_t n = 1 + pick(rng, 3);
        for (std::size_t k = 0; k < n; ++k) el.push_back(sub());
        return Expr::array(std::move(el));
    }
    }
}

/// Expressions over vector variables `v`, `w` and scalar `s` built only from
/// componentwise operations. `scalar_only` restricts leaves to `s` and
/// constants.
inline Expr random_componentwise_expr(std::mt19937_64& rng, int depth, bool scalar_only = false) {
    static const char* fns[] = {"sin", "cos", "atan", "exp", "abs", "sqr", "sign", "floor"};
    if (depth <= 0 || pick(rng, 5) == 0) {
        switch (pick(rng, scalar_only ? 2 : 4)) {
        case 0: return Expr::variable("s");
        case 1: return Expr::literal(Value(uniform(rng, 0.5, 2.0)));
        case 2: return Expr::variable("v");
        default: return Expr::variable("w");
        }
    }
    switch (pick(rng, 7)) {
    case 0: return Expr::binary(BinaryOp::Add, random_componentwise_expr(rng, depth - 1, scalar_only),
                                random_componentwise_expr(rng, depth - 1, scalar_only));
    case 1: return Expr::binary(BinaryOp::Sub, random_componentwise_expr(rng, depth - 1, scalar_only),
                                random_componentwise_expr(rng, depth - 1, scalar_only));
    case 2: {
        // Scalar factor on one side keeps `*` componentwise.
        const bool left = pick(rng, 2) == 0;
        Expr scalar = random_componentwise_expr(rng, depth - 1, true);
        Expr any = random_componentwise_expr(rng, depth - 1, scalar_only);
        return left ? Expr::binary(BinaryOp::Mul, scalar, any) : Expr::binary(BinaryOp::Mul, any, scalar);
    }
    case 3: return Expr::binary(BinaryOp::Div, random_componentwise_expr(rng, depth - 1, scalar_only),
                                random_componentwise_expr(rng, depth - 1, scalar_only));
    case 4: return Expr::binary(BinaryOp::Pow, random_componentwise_expr(rng, depth - 1, scalar_only),
                                Expr::literal(Value(static_cast<std::int64_t>(pick(rng, 3)))));
    case 5: return Expr::unary(UnaryOp::Negate, random_componentwise_expr(rng, depth - 1, scalar_only));
    default:
        if (pick(rng, 3) == 0)
            return Expr::call(pick(rng, 2) ? "min" : "max", {random_componentwise_expr(rng, depth - 1, scalar_only),
                                                              random_componentwise_expr(rng, depth - 1, scalar_only)});
        return Expr::call(fns[pick(rng, std::size(fns))], {random_componentwise_expr(rng, depth - 1, scalar_only)});
    }
}

struct BroadcastOutcome {
    bool checked = false;  ///< false when both paths failed consistently
    bool ok = true;
    std::string detail;
};

/// Evaluates `e` once with vectors bound to `v`, `w` and then once per
/// component with scalars bound; every component must match bitwise, and a
/// failure on one path must be mirrored by a failure on the other.
inline BroadcastOutcome check_componentwise(const Expr& e, const Vector& v, const Vector& w, double s) {
    BroadcastOutcome out;
    Env vec_env;
    vec_env.set("v", v);
    vec_env.set("w", w);
    vec_env.set("s", s);
    std::optional<Value> whole;
    try {
        whole = eval(e, vec_env);
    } catch (const vrf::Error&) {
    }
    bool any_component_failed = false;
    std::vector<std::optional<double>> parts(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        Env env;
        env.set("v", v[i]);
        env.set("w", w[i]);
        env.set("s", s);
        try {
            parts[i] = eval(e, env).to_real();
        } catch (const vrf::Error&) {
            any_component_failed = true;
        }
    }
    if (!whole) {
        out.ok = any_component_failed;
        if (!out.ok) out.detail = "vector evaluation failed but every component succeeded: " + to_string(e);
        return out;
    }
    out.checked = true;
    if (any_component_failed) {
        out.ok = false;
        out.detail = "a component failed but vector evaluation succeeded: " + to_string(e);
        return out;
    }
    // An expression without v or w collapses to a scalar; compare it to each component.
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double got = whole->is<Vector>() ? whole->as<Vector>()[i] : whole->to_real();
        if (std::bit_cast<std::uint64_t>(got) != std::bit_cast<std::uint64_t>(*parts[i])) {
            out.ok = false;
            out.detail = to_string(e) + " differs at component " + std::to_string(i);
            return out;
        }
    }
    return out;
}

}  // namespace vrf::fixtures
