#include "vrf/formula/expr.hpp"

#include <type_traits>

namespace vrf::formula {

namespace {

// Binding strength, loosest first.
enum Prec : int { kOr = 1, kAnd, kCmp, kAdd, kMul, kPow, kUnary, kPostfix, kPrimary };

int precedence(BinaryOp op) {
    switch (op) {
    case BinaryOp::Or: return kOr;
    case BinaryOp::And: return kAnd;
    case BinaryOp::Add:
    case BinaryOp::Sub: return kAdd;
    case BinaryOp::Mul:
    case BinaryOp::Div: return kMul;
    case BinaryOp::Pow: return kPow;
    default: return kCmp;
    }
}

int precedence(const Expr& e) {
    if (const auto* b = e.get<Expr::Binary>()) return precedence(b->op);
    if (const auto* u = e.get<Expr::Unary>()) {
        if (u->op == UnaryOp::Transpose) return kPostfix;
        if (u->op == UnaryOp::Inverse) return kPrimary;
        return kUnary;
    }
    if (e.get<Expr::Call>()) return kPostfix;
    if (const auto* l = e.get<Expr::Literal>()) {
        if (l->value.is_scalar() && l->value.to_real() < 0) return kUnary;
    }
    return kPrimary;
}

std::string literal_text(const Value& v) {
    if (v.is<double>()) {
        std::string s = format_real(v.as<double>());
        if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
        return s;
    }
    if (v.is<Vector>()) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.as<Vector>().size(); ++i) {
            if (i) s += ", ";
            s += literal_text(Value(v.as<Vector>()[i]));
        }
        return s + "]";
    }
    if (v.is<Matrix>()) {
        const auto& m = v.as<Matrix>();
        std::string s = "[";
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r) s += ", ";
            Vector row(m.data().begin() + static_cast<std::ptrdiff_t>(r * m.cols()),
                       m.data().begin() + static_cast<std::ptrdiff_t>((r + 1) * m.cols()));
            s += literal_text(Value(std::move(row)));
        }
        return s + "]";
    }
    if (v.is<FunctionRef>()) return v.as<FunctionRef>().name();
    return to_string(v);
}

void print(const Expr& e, int min_prec, std::string& out);

void print_list(const std::vector<Expr>& items, std::string& out) {
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        print(items[i], kOr, out);
    }
}

void print_node(const Expr& e, std::string& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Literal>) {
                out += literal_text(n.value);
            } else if constexpr (std::is_same_v<T, Expr::Variable>) {
                out += n.name;
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                switch (n.op) {
                case UnaryOp::Negate:
                    out += '-';
                    print(n.operand, kUnary, out);
                    break;
                case UnaryOp::Not:
                    out += '!';
                    print(n.operand, kUnary, out);
                    break;
                case UnaryOp::Transpose:
                    print(n.operand, kPostfix, out);
                    out += '\'';
                    break;
                case UnaryOp::Inverse:
                    out += "inv(";
                    print(n.operand, kOr, out);
                    out += ')';
                    break;
                }
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                const int p = precedence(n.op);
                const bool right_assoc = n.op == BinaryOp::Pow;
                print(n.lhs, right_assoc ? p + 1 : p, out);
                out += ' ';
                out += op_symbol(n.op);
                out += ' ';
                print(n.rhs, right_assoc ? p : p + 1, out);
            } else if constexpr (std::is_same_v<T, Expr::Call>) {
                if (const auto* name = std::get_if<std::string>(&n.callee)) out += *name;
                else print(std::get<Expr>(n.callee), kPostfix, out);
                out += '(';
                print_list(n.args, out);
                out += ')';
            } else if constexpr (std::is_same_v<T, Expr::Delta>) {
                out += "delta(";
                print(n.arg, kOr, out);
                out += ')';
            } else if constexpr (std::is_same_v<T, Expr::Array>) {
                out += '[';
                print_list(n.elements, out);
                out += ']';
            }
        },
        e.node());
}

void print(const Expr& e, int min_prec, std::string& out) {
    const bool wrap = precedence(e) < min_prec;
    if (wrap) out += '(';
    print_node(e, out);
    if (wrap) out += ')';
}

}  // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print(e, kOr, out);
    return out;
}

}  // namespace vrf::formula
