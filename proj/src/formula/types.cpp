#include "vrf/formula/types.hpp"

#include "rules.hpp"
#include "vrf/error.hpp"
#include "vrf/formula/builtins.hpp"

#include <charconv>
#include <type_traits>
#include <vector>

namespace vrf::formula {

using Kind = TypeTag::Kind;

namespace {

bool is_numeric(const TypeTag& t) {
    return t.kind == Kind::Integer || t.kind == Kind::Real || t.kind == Kind::Vector || t.kind == Kind::Matrix ||
           t.kind == Kind::Unknown;
}

bool dims_compatible(const std::optional<std::size_t>& a, const std::optional<std::size_t>& b) {
    return !a || !b || *a == *b;
}

std::optional<std::size_t> merge(const std::optional<std::size_t>& a, const std::optional<std::size_t>& b) {
    return a ? a : b;
}

[[noreturn]] void mismatch(const char* what, const TypeTag& a, const TypeTag& b) {
    throw TypeError(std::string("type mismatch: ") + what + " on " + to_string(a) + " and " + to_string(b));
}

[[noreturn]] void dim_mismatch(const char* what, const TypeTag& a, const TypeTag& b) {
    throw TypeError(std::string("dimension mismatch: ") + what + " on " + to_string(a) + " and " + to_string(b));
}

TypeTag scalar_result(const TypeTag& a, const TypeTag& b) {
    return a.kind == Kind::Integer && b.kind == Kind::Integer ? TypeTag::integer() : TypeTag::real();
}

TypeTag same_shape(const char* what, const TypeTag& a, const TypeTag& b) {
    if (!dims_compatible(a.rows, b.rows) || !dims_compatible(a.cols, b.cols)) dim_mismatch(what, a, b);
    return {a.kind, merge(a.rows, b.rows), merge(a.cols, b.cols), 0};
}

/// Rules for + and -, also the base for componentwise / and ^.
TypeTag componentwise(const char* what, const TypeTag& a, const TypeTag& b, bool allow_matrix) {
    if (a.is_scalar() && b.is_scalar()) return scalar_result(a, b);
    if (a.is_scalar() && b.kind == Kind::Vector) return b;
    if (a.kind == Kind::Vector && b.is_scalar()) return a;
    if (a.kind == Kind::Vector && b.kind == Kind::Vector) return same_shape(what, a, b);
    if (allow_matrix) {
        if (a.is_scalar() && b.kind == Kind::Matrix) return b;
        if (a.kind == Kind::Matrix && b.is_scalar()) return a;
        if (a.kind == Kind::Matrix && b.kind == Kind::Matrix) return same_shape(what, a, b);
    }
    mismatch(what, a, b);
}

}  // namespace

bool TypeTag::unifies_with(const TypeTag& o) const {
    if (kind == Kind::Unknown || o.kind == Kind::Unknown) return is_numeric(*this) && is_numeric(o);
    if (is_scalar() && o.is_scalar()) return true;
    if (kind != o.kind) return false;
    if (kind == Kind::Function) return arity == o.arity;
    return dims_compatible(rows, o.rows) && dims_compatible(cols, o.cols);
}

bool TypeTag::admits(const Value& v) const {
    const TypeTag actual = type_of(v);
    switch (kind) {
    case Kind::Unknown: return is_numeric(actual);
    case Kind::Real: return actual.is_scalar();
    case Kind::Function: return actual.kind == Kind::Function && actual.arity == arity;
    default: return actual.kind == kind && dims_compatible(rows, actual.rows) && dims_compatible(cols, actual.cols);
    }
}

std::string to_string(const TypeTag& t) {
    auto dim = [](const std::optional<std::size_t>& d) { return d ? std::to_string(*d) : std::string("?"); };
    switch (t.kind) {
    case Kind::Boolean: return "Boolean";
    case Kind::Integer: return "Integer";
    case Kind::Real: return "Real";
    case Kind::Vector: return "Vector(" + dim(t.rows) + ")";
    case Kind::Matrix: return "Matrix(" + dim(t.rows) + "," + dim(t.cols) + ")";
    case Kind::Function: return "Function/" + std::to_string(t.arity);
    case Kind::Unknown: return "Unknown";
    }
    return "?";
}

TypeTag parse_type_tag(std::string_view text) {
    auto bad = [&]() { return TypeError("unknown type '" + std::string(text) + "'"); };
    auto dim = [&](std::string_view d) -> std::optional<std::size_t> {
        if (d == "?") return std::nullopt;
        std::size_t n = 0;
        auto [ptr, ec] = std::from_chars(d.data(), d.data() + d.size(), n);
        if (ec != std::errc() || ptr != d.data() + d.size() || n == 0) throw bad();
        return n;
    };
    if (text == "Boolean") return TypeTag::boolean();
    if (text == "Integer") return TypeTag::integer();
    if (text == "Real") return TypeTag::real();
    if (text == "Unknown") return TypeTag::unknown();
    if (text.starts_with("Function/")) {
        const auto n = dim(text.substr(9));
        if (!n) throw bad();
        return TypeTag::function(static_cast<int>(*n));
    }
    if (!text.ends_with(')')) throw bad();
    if (text.starts_with("Vector(")) return TypeTag::vector(dim(text.substr(7, text.size() - 8)));
    if (text.starts_with("Matrix(")) {
        const std::string_view inner = text.substr(7, text.size() - 8);
        const auto comma = inner.find(',');
        if (comma == std::string_view::npos) throw bad();
        return TypeTag::matrix(dim(inner.substr(0, comma)), dim(inner.substr(comma + 1)));
    }
    throw bad();
}

TypeTag type_of(const Value& v) {
    switch (v.kind()) {
    case ValueKind::Boolean: return TypeTag::boolean();
    case ValueKind::Integer: return TypeTag::integer();
    case ValueKind::Real: return TypeTag::real();
    case ValueKind::Vector: return TypeTag::vector(v.as<Vector>().size());
    case ValueKind::Matrix: return TypeTag::matrix(v.as<Matrix>().rows(), v.as<Matrix>().cols());
    case ValueKind::Function: return TypeTag::function(v.as<FunctionRef>().arity());
    }
    return TypeTag::unknown();
}

namespace rules {

TypeTag unary(UnaryOp op, const TypeTag& a) {
    switch (op) {
    case UnaryOp::Negate:
        if (is_numeric(a)) return a;
        break;
    case UnaryOp::Not:
        if (a.kind == Kind::Boolean) return a;
        break;
    case UnaryOp::Transpose:
        if (a.kind == Kind::Matrix) return TypeTag::matrix(a.cols, a.rows);
        if (a.kind == Kind::Vector) return TypeTag::matrix(1, a.rows);
        if (a.kind == Kind::Unknown) return TypeTag::matrix();
        break;
    case UnaryOp::Inverse:
        if (a.kind == Kind::Matrix) {
            if (a.rows && a.cols && *a.rows != *a.cols)
                throw TypeError("dimension mismatch: inv requires a square matrix, got " + to_string(a));
            const auto n = merge(a.rows, a.cols);
            return TypeTag::matrix(n, n);
        }
        if (a.kind == Kind::Unknown) return TypeTag::matrix();
        break;
    }
    static const char* names[] = {"negation", "logical not", "transpose", "inv"};
    throw TypeError(std::string("type mismatch: ") + names[static_cast<int>(op)] + " of " + to_string(a));
}

TypeTag binary(BinaryOp op, const TypeTag& a, const TypeTag& b) {
    const char* sym = op_symbol(op);
    switch (op) {
    case BinaryOp::And:
    case BinaryOp::Or:
        if (a.kind == Kind::Boolean && b.kind == Kind::Boolean) return TypeTag::boolean();
        mismatch(sym, a, b);
    case BinaryOp::Eq:
    case BinaryOp::Ne:
        if (a.kind == Kind::Boolean && b.kind == Kind::Boolean) return TypeTag::boolean();
        [[fallthrough]];
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: {
        auto scalar_like = [](const TypeTag& t) { return t.is_scalar() || t.kind == Kind::Unknown; };
        if (scalar_like(a) && scalar_like(b)) return TypeTag::boolean();
        mismatch(sym, a, b);
    }
    default: break;
    }

    if (!is_numeric(a) || !is_numeric(b)) mismatch(sym, a, b);
    if (a.kind == Kind::Unknown || b.kind == Kind::Unknown) return TypeTag::unknown();

    switch (op) {
    case BinaryOp::Add:
    case BinaryOp::Sub: return componentwise(sym, a, b, true);
    case BinaryOp::Div: {
        if (b.kind == Kind::Matrix) mismatch(sym, a, b);
        if (a.kind == Kind::Matrix && b.kind != Kind::Matrix && !b.is_scalar()) mismatch(sym, a, b);
        const TypeTag r = componentwise(sym, a, b, true);
        return r.kind == Kind::Integer ? TypeTag::real() : r;
    }
    case BinaryOp::Pow: {
        const TypeTag r = componentwise(sym, a, b, false);
        return r.kind == Kind::Integer ? TypeTag::real() : r;
    }
    case BinaryOp::Mul: {
        if (a.is_scalar() || b.is_scalar()) return componentwise(sym, a, b, true);
        if (a.kind == Kind::Matrix && b.kind == Kind::Matrix) {
            if (!dims_compatible(a.cols, b.rows)) dim_mismatch(sym, a, b);
            return TypeTag::matrix(a.rows, b.cols);
        }
        if (a.kind == Kind::Matrix && b.kind == Kind::Vector) {
            if (!dims_compatible(a.cols, b.rows)) dim_mismatch(sym, a, b);
            if (!a.rows) return TypeTag::unknown();
            return *a.rows == 1 ? TypeTag::real() : TypeTag::vector(a.rows);
        }
        mismatch(sym, a, b);
    }
    default: break;
    }
    mismatch(sym, a, b);
}

TypeTag elementwise_call(std::string_view callee, int arity, std::span<const TypeTag> args) {
    const std::string name(callee);
    if (static_cast<int>(args.size()) != arity)
        throw TypeError(name + " expects " + std::to_string(arity) + " argument(s), got " +
                        std::to_string(args.size()));

    bool any_function = false;
    for (const auto& a : args) any_function |= a.kind == Kind::Function;
    if (any_function) {
        std::optional<int> inner;
        for (const auto& a : args) {
            if (a.kind == Kind::Function) {
                if (inner && *inner != a.arity)
                    throw TypeError("type mismatch: composed functions in " + name + " have different arities");
                inner = a.arity;
            } else if (!a.is_scalar()) {
                throw TypeError("type mismatch: composition " + name + " accepts functions and scalars, got " +
                                to_string(a));
            }
        }
        return TypeTag::function(*inner);
    }

    TypeTag shape = TypeTag::real();
    bool unknown = false;
    for (const auto& a : args) {
        switch (a.kind) {
        case Kind::Integer:
        case Kind::Real: break;
        case Kind::Unknown: unknown = true; break;
        case Kind::Vector:
        case Kind::Matrix:
            if (shape.kind == Kind::Real) shape = a;
            else if (shape.kind != a.kind) throw TypeError("type mismatch: " + name + " mixes vector and matrix arguments");
            else shape = same_shape(name.c_str(), shape, a);
            break;
        default: throw TypeError("type mismatch: " + name + " of " + to_string(a));
        }
    }
    return unknown ? TypeTag::unknown() : shape;
}

TypeTag cross(const TypeTag& a, const TypeTag& b) {
    for (const auto* t : {&a, &b}) {
        if (t->kind == Kind::Unknown) continue;
        if (t->kind != Kind::Vector) mismatch("cross", a, b);
        if (t->rows && *t->rows != 3) dim_mismatch("cross", a, b);
    }
    return TypeTag::vector(3);
}

TypeTag delta(const TypeTag& a) {
    if (a.is_scalar() || a.kind == Kind::Unknown) return TypeTag::real();
    throw TypeError("type mismatch: delta of " + to_string(a));
}

TypeTag array(std::span<const TypeTag> elements) {
    bool all_scalar = true, all_vector = true;
    std::optional<std::size_t> len;
    for (const auto& e : elements) {
        if (e.kind == Kind::Unknown) return TypeTag::unknown();
        all_scalar &= e.is_scalar();
        all_vector &= e.kind == Kind::Vector;
        if (e.kind == Kind::Vector) {
            if (!dims_compatible(len, e.rows)) throw TypeError("dimension mismatch: matrix rows of unequal length");
            len = merge(len, e.rows);
        }
    }
    if (all_scalar) return TypeTag::vector(elements.size());
    if (all_vector) return TypeTag::matrix(elements.size(), len);
    throw TypeError("type mismatch: array elements must be all scalars or all vectors");
}

}  // namespace rules

namespace {

TypeTag infer_call_target(const Expr::Call& call, const TypeMap& types, std::span<const TypeTag> args) {
    if (const auto* name = std::get_if<std::string>(&call.callee)) {
        if (*name == "cross") return rules::cross(args[0], args[1]);
        if (const Builtin* b = find_builtin(*name)) return rules::elementwise_call(*name, b->arity, args);
        auto it = types.find(*name);
        if (it == types.end()) throw TypeError("unknown variable '" + *name + "'");
        if (it->second.kind == Kind::Unknown) return TypeTag::unknown();
        if (it->second.kind != Kind::Function) throw TypeError("'" + *name + "' is not callable: " + to_string(it->second));
        return rules::elementwise_call(*name, it->second.arity, args);
    }
    const TypeTag f = infer(std::get<Expr>(call.callee), types);
    if (f.kind != Kind::Function) throw TypeError("expression is not callable: " + to_string(f));
    return rules::elementwise_call("function", f.arity, args);
}

}  // namespace

TypeTag infer(const Expr& e, const TypeMap& types) {
    return std::visit(
        [&](const auto& n) -> TypeTag {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Literal>) {
                return type_of(n.value);
            } else if constexpr (std::is_same_v<T, Expr::Variable>) {
                if (const Builtin* b = find_builtin(n.name)) return TypeTag::function(b->arity);
                auto it = types.find(n.name);
                if (it == types.end()) throw TypeError("unknown variable '" + n.name + "'");
                return it->second;
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                return rules::unary(n.op, infer(n.operand, types));
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                return rules::binary(n.op, infer(n.lhs, types), infer(n.rhs, types));
            } else if constexpr (std::is_same_v<T, Expr::Call>) {
                std::vector<TypeTag> args;
                for (const auto& a : n.args) args.push_back(infer(a, types));
                return infer_call_target(n, types, args);
            } else if constexpr (std::is_same_v<T, Expr::Delta>) {
                return rules::delta(infer(n.arg, types));
            } else {
                std::vector<TypeTag> el;
                for (const auto& a : n.elements) el.push_back(infer(a, types));
                return rules::array(el);
            }
        },
        e.node());
}

}  // namespace vrf::formula
