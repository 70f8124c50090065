#include "vrf/formula/expr.hpp"

#include "vrf/formula/builtins.hpp"

#include <optional>
#include <type_traits>

namespace vrf::formula {

Expr Expr::literal(Value v) { return Expr(std::make_shared<const Node>(Literal{std::move(v)})); }
Expr Expr::variable(std::string name) { return Expr(std::make_shared<const Node>(Variable{std::move(name)})); }
Expr Expr::unary(UnaryOp op, Expr operand) {
    return Expr(std::make_shared<const Node>(Unary{op, std::move(operand)}));
}
Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
    return Expr(std::make_shared<const Node>(Binary{op, std::move(lhs), std::move(rhs)}));
}
Expr Expr::call(std::string name, std::vector<Expr> args) {
    return Expr(std::make_shared<const Node>(Call{std::move(name), std::move(args)}));
}
Expr Expr::call(Expr callee, std::vector<Expr> args) {
    return Expr(std::make_shared<const Node>(Call{std::move(callee), std::move(args)}));
}
Expr Expr::delta(Expr arg) { return Expr(std::make_shared<const Node>(Delta{std::move(arg)})); }
namespace {

bool is_numeric_literal(const Expr& e) {
    const auto* lit = e.get<Expr::Literal>();
    return lit && lit->value.is_scalar();
}

std::optional<double> literal_number(const Expr& e) {
    if (is_numeric_literal(e)) return e.get<Expr::Literal>()->value.to_real();
    if (const auto* u = e.get<Expr::Unary>(); u && u->op == UnaryOp::Negate && is_numeric_literal(u->operand))
        return -u->operand.get<Expr::Literal>()->value.to_real();
    return std::nullopt;
}

}  // namespace

Expr Expr::array(std::vector<Expr> elements) {
    Vector numbers;
    for (const auto& e : elements) {
        auto n = literal_number(e);
        if (!n) break;
        numbers.push_back(*n);
    }
    if (numbers.size() == elements.size()) return literal(std::move(numbers));

    std::vector<Vector> rows;
    for (const auto& e : elements) {
        const auto* lit = e.get<Literal>();
        if (!lit || !lit->value.is<Vector>()) break;
        if (!rows.empty() && rows.front().size() != lit->value.as<Vector>().size()) break;
        rows.push_back(lit->value.as<Vector>());
    }
    if (rows.size() == elements.size()) return literal(Matrix::from_rows(rows));
    return Expr(std::make_shared<const Node>(Array{std::move(elements)}));
}

bool operator==(const Expr& a, const Expr& b) { return a.node_ == b.node_ || *a.node_ == *b.node_; }

const char* op_symbol(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Pow: return "^";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
    }
    return "?";
}

namespace {

void collect_free(const Expr& e, std::set<std::string>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Variable>) {
                if (!is_reserved(n.name)) out.insert(n.name);
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                collect_free(n.operand, out);
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                collect_free(n.lhs, out);
                collect_free(n.rhs, out);
            } else if constexpr (std::is_same_v<T, Expr::Call>) {
                if (const auto* name = std::get_if<std::string>(&n.callee)) {
                    if (!is_reserved(*name)) out.insert(*name);
                } else {
                    collect_free(std::get<Expr>(n.callee), out);
                }
                for (const auto& a : n.args) collect_free(a, out);
            } else if constexpr (std::is_same_v<T, Expr::Delta>) {
                collect_free(n.arg, out);
            } else if constexpr (std::is_same_v<T, Expr::Array>) {
                for (const auto& a : n.elements) collect_free(a, out);
            }
        },
        e.node());
}

}  // namespace

std::set<std::string> free_variables(const Expr& e) {
    std::set<std::string> out;
    collect_free(e, out);
    return out;
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
    auto rec = [&](const Expr& x) { return substitute(x, bindings); };
    return std::visit(
        [&](const auto& n) -> Expr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Literal>) {
                return e;
            } else if constexpr (std::is_same_v<T, Expr::Variable>) {
                auto it = bindings.find(n.name);
                return it == bindings.end() ? e : it->second;
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                return Expr::unary(n.op, rec(n.operand));
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                return Expr::binary(n.op, rec(n.lhs), rec(n.rhs));
            } else if constexpr (std::is_same_v<T, Expr::Call>) {
                std::vector<Expr> args;
                for (const auto& a : n.args) args.push_back(rec(a));
                if (const auto* name = std::get_if<std::string>(&n.callee)) {
                    auto it = bindings.find(*name);
                    if (it != bindings.end()) {
                        if (const auto* v = it->second.template get<Expr::Variable>()) return Expr::call(v->name, std::move(args));
                        return Expr::call(it->second, std::move(args));
                    }
                    return Expr::call(*name, std::move(args));
                }
                return Expr::call(rec(std::get<Expr>(n.callee)), std::move(args));
            } else if constexpr (std::is_same_v<T, Expr::Delta>) {
                return Expr::delta(rec(n.arg));
            } else {
                std::vector<Expr> el;
                for (const auto& a : n.elements) el.push_back(rec(a));
                return Expr::array(std::move(el));
            }
        },
        e.node());
}

bool contains_delta(const Expr& e) {
    return std::visit(
        [](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Delta>) {
                return true;
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                return contains_delta(n.operand);
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                return contains_delta(n.lhs) || contains_delta(n.rhs);
            } else if constexpr (std::is_same_v<T, Expr::Call>) {
                if (const auto* c = std::get_if<Expr>(&n.callee); c && contains_delta(*c)) return true;
                for (const auto& a : n.args)
                    if (contains_delta(a)) return true;
                return false;
            } else if constexpr (std::is_same_v<T, Expr::Array>) {
                for (const auto& a : n.elements)
                    if (contains_delta(a)) return true;
                return false;
            } else {
                return false;
            }
        },
        e.node());
}

}  // namespace vrf::formula
