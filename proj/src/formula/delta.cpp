#include "vrf/error.hpp"
#include "vrf/formula/eval.hpp"

#include <optional>

namespace vrf::formula {

namespace {

struct Term {
    bool negative;
    Expr expr;
};

void additive_terms(const Expr& e, bool negative, std::vector<Term>& out) {
    if (const auto* b = e.get<Expr::Binary>(); b && (b->op == BinaryOp::Add || b->op == BinaryOp::Sub)) {
        additive_terms(b->lhs, negative, out);
        additive_terms(b->rhs, b->op == BinaryOp::Sub ? !negative : negative, out);
        return;
    }
    if (const auto* u = e.get<Expr::Unary>(); u && u->op == UnaryOp::Negate) {
        additive_terms(u->operand, !negative, out);
        return;
    }
    out.push_back({negative, e});
}

void factors(const Expr& e, std::vector<Expr>& out) {
    if (const auto* b = e.get<Expr::Binary>(); b && b->op == BinaryOp::Mul) {
        factors(b->lhs, out);
        factors(b->rhs, out);
        return;
    }
    out.push_back(e);
}

[[noreturn]] void malformed(const std::string& why) { throw EvalError("malformed delta placement: " + why); }

Expr firing_time(const Expr& arg, std::string_view time_var) {
    auto is_time = [&](const Expr& x) {
        const auto* v = x.get<Expr::Variable>();
        return v && v->name == time_var;
    };
    auto require_constant = [&](const Expr& c) {
        if (contains_delta(c) || !free_variables(c).empty()) malformed("non-constant firing time " + to_string(c));
    };
    if (is_time(arg)) return Expr::literal(Value(0.0));
    if (const auto* b = arg.get<Expr::Binary>(); b && is_time(b->lhs)) {
        if (b->op == BinaryOp::Sub) {
            require_constant(b->rhs);
            return b->rhs;
        }
        if (b->op == BinaryOp::Add) {
            require_constant(b->rhs);
            return Expr::unary(UnaryOp::Negate, b->rhs);
        }
    }
    malformed("delta argument must have the form " + std::string(time_var) + " - c, got " + to_string(arg));
}

}  // namespace

DeltaSplit extract_delta_terms(const Expr& e, std::string_view time_var) {
    std::vector<Term> terms;
    additive_terms(e, false, terms);

    std::vector<Term> smooth;
    std::vector<Impulse> impulses;
    for (const auto& term : terms) {
        if (!contains_delta(term.expr)) {
            smooth.push_back(term);
            continue;
        }
        std::vector<Expr> fs;
        factors(term.expr, fs);
        const Expr::Delta* delta = nullptr;
        std::optional<Expr> coefficient;
        for (const auto& f : fs) {
            if (const auto* d = f.get<Expr::Delta>()) {
                if (delta) malformed("product of delta terms");
                if (contains_delta(d->arg)) malformed("nested delta");
                delta = d;
                continue;
            }
            if (contains_delta(f)) malformed("delta inside " + to_string(f));
            coefficient = coefficient ? Expr::binary(BinaryOp::Mul, *coefficient, f) : f;
        }
        Expr coef = coefficient ? *coefficient : Expr::literal(Value(std::int64_t{1}));
        if (term.negative) coef = Expr::unary(UnaryOp::Negate, coef);
        impulses.push_back({coef, firing_time(delta->arg, time_var)});
    }

    if (smooth.empty()) return {Expr::literal(Value(std::int64_t{0})), std::move(impulses)};
    Expr out = smooth.front().negative ? Expr::unary(UnaryOp::Negate, smooth.front().expr) : smooth.front().expr;
    for (std::size_t i = 1; i < smooth.size(); ++i)
        out = Expr::binary(smooth[i].negative ? BinaryOp::Sub : BinaryOp::Add, out, smooth[i].expr);
    return {out, std::move(impulses)};
}

}  // namespace vrf::formula
