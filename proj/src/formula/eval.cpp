#include "vrf/formula/eval.hpp"

#include "rules.hpp"
#include "vrf/error.hpp"
#include "vrf/formula/builtins.hpp"

#include <cmath>
#include <optional>
#include <type_traits>

namespace vrf::formula {

// ---------------------------------------------------------------------------
// Function values

namespace {

struct Composition {
    FunctionRef outer;
    std::vector<FunctionRef::Part> parts;
};

}  // namespace

struct FunctionRef::Node {
    std::string name;
    int arity;
    std::variant<const Builtin*, Composition, HostFn> rule;
};

FunctionRef FunctionRef::builtin(std::string_view name) {
    const Builtin* b = find_builtin(name);
    if (!b) throw TypeError("unknown built-in function '" + std::string(name) + "'");
    // One shared node per built-in keeps identity comparison meaningful.
    static std::map<std::string_view, std::shared_ptr<const Node>> cache = [] {
        std::map<std::string_view, std::shared_ptr<const Node>> m;
        for (const auto& fn : builtins())
            m.emplace(fn.name, std::make_shared<const Node>(Node{std::string(fn.name), fn.arity, &fn}));
        return m;
    }();
    return FunctionRef(cache.at(b->name));
}

FunctionRef FunctionRef::compose(const FunctionRef& outer, std::vector<Part> parts) {
    if (static_cast<int>(parts.size()) != outer.arity())
        throw TypeError(outer.name() + " expects " + std::to_string(outer.arity()) + " argument(s)");
    std::optional<int> inner;
    std::string name = outer.name() + "(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) name += ", ";
        if (const auto* f = std::get_if<FunctionRef>(&parts[i])) {
            if (inner && *inner != f->arity()) throw TypeError("composed functions have different arities");
            inner = f->arity();
            name += f->name();
        } else {
            name += format_real(std::get<double>(parts[i]));
        }
    }
    if (!inner) throw TypeError("composition requires at least one function argument");
    name += ")";
    return FunctionRef(
        std::make_shared<const Node>(Node{std::move(name), *inner, Composition{outer, std::move(parts)}}));
}

FunctionRef FunctionRef::host(std::string name, int arity, HostFn fn) {
    if (arity < 1) throw TypeError("function arity must be at least 1");
    return FunctionRef(std::make_shared<const Node>(Node{std::move(name), arity, std::move(fn)}));
}

const std::string& FunctionRef::name() const { return node_->name; }
int FunctionRef::arity() const { return node_->arity; }

double FunctionRef::at(std::span<const double> args) const {
    return std::visit(
        [&](const auto& rule) -> double {
            using T = std::decay_t<decltype(rule)>;
            if constexpr (std::is_same_v<T, const Builtin*>) {
                return rule->fn(args);
            } else if constexpr (std::is_same_v<T, Composition>) {
                std::vector<double> inner;
                inner.reserve(rule.parts.size());
                for (const auto& p : rule.parts) {
                    if (const auto* f = std::get_if<FunctionRef>(&p)) inner.push_back(f->at(args));
                    else inner.push_back(std::get<double>(p));
                }
                return rule.outer.at(inner);
            } else {
                return rule(args);
            }
        },
        node_->rule);
}

Value FunctionRef::operator()(std::span<const Value> args) const {
    std::vector<TypeTag> tags;
    for (const auto& a : args) tags.push_back(type_of(a));
    const TypeTag result = rules::elementwise_call(name(), arity(), tags);

    if (result.kind == TypeTag::Kind::Function) {
        std::vector<Part> parts;
        for (const auto& a : args) {
            if (a.is<FunctionRef>()) parts.emplace_back(a.as<FunctionRef>());
            else parts.emplace_back(a.to_real());
        }
        return compose(*this, std::move(parts));
    }

    std::vector<double> point(args.size());
    auto gather = [&](std::size_t i) {
        for (std::size_t k = 0; k < args.size(); ++k) {
            const Value& a = args[k];
            if (a.is<Vector>()) point[k] = a.as<Vector>()[i];
            else if (a.is<Matrix>()) point[k] = a.as<Matrix>().data()[i];
            else point[k] = a.to_real();
        }
        return std::span<const double>(point);
    };

    Value out = 0.0;
    if (result.kind == TypeTag::Kind::Real) {
        out = at(gather(0));
    } else if (result.kind == TypeTag::Kind::Vector) {
        Vector v(*result.rows);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = at(gather(i));
        out = std::move(v);
    } else {
        Matrix m(*result.rows, *result.cols);
        for (std::size_t i = 0; i < m.data().size(); ++i) m.data()[i] = at(gather(i));
        out = std::move(m);
    }
    require_finite(out, name().c_str());
    return out;
}

// ---------------------------------------------------------------------------
// Env

void Env::set(std::string name, Value v) {
    if (is_reserved(name)) throw EvalError("cannot bind reserved name '" + name + "'");
    vars_.insert_or_assign(std::move(name), std::move(v));
}

void Env::define_function(std::string name, FunctionRef f) {
    if (is_reserved(name)) throw EvalError("cannot bind reserved name '" + name + "'");
    funcs_.insert_or_assign(std::move(name), std::move(f));
}

const Value* Env::find(std::string_view name) const {
    auto it = vars_.find(name);
    return it == vars_.end() ? nullptr : &it->second;
}

const FunctionRef* Env::find_function(std::string_view name) const {
    auto it = funcs_.find(name);
    return it == funcs_.end() ? nullptr : &it->second;
}

TypeMap Env::types() const {
    TypeMap out;
    for (const auto& [k, v] : vars_) out.emplace(k, type_of(v));
    for (const auto& [k, f] : funcs_) out.emplace(k, TypeTag::function(f.arity()));
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

std::int64_t checked_int(BinaryOp op, std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    bool overflow = false;
    switch (op) {
    case BinaryOp::Add: overflow = __builtin_add_overflow(a, b, &r); break;
    case BinaryOp::Sub: overflow = __builtin_sub_overflow(a, b, &r); break;
    case BinaryOp::Mul: overflow = __builtin_mul_overflow(a, b, &r); break;
    default: throw EvalError("internal: not an integer operation");
    }
    if (overflow) throw EvalError("integer overflow in " + std::string(op_symbol(op)));
    return r;
}

double scalar_op(BinaryOp op, double a, double b) {
    switch (op) {
    case BinaryOp::Add: return a + b;
    case BinaryOp::Sub: return a - b;
    case BinaryOp::Mul: return a * b;
    case BinaryOp::Div:
        if (b == 0.0) throw EvalError("division by zero");
        return a / b;
    case BinaryOp::Pow: return std::pow(a, b);
    default: throw EvalError("internal: not an arithmetic operation");
    }
}

/// Elementwise data of a vector or matrix operand.
const std::vector<double>* elements(const Value& v) {
    if (v.is<Vector>()) return &v.as<Vector>();
    if (v.is<Matrix>()) return &v.as<Matrix>().data();
    return nullptr;
}

Value with_elements(const Value& shape, std::vector<double> data) {
    if (shape.is<Vector>()) return Value(std::move(data));
    const auto& m = shape.as<Matrix>();
    return Value(Matrix(m.rows(), m.cols(), std::move(data)));
}

Value componentwise(BinaryOp op, const Value& a, const Value& b) {
    const auto* ea = elements(a);
    const auto* eb = elements(b);
    if (!ea && !eb) return scalar_op(op, a.to_real(), b.to_real());
    if (ea && eb && ea->size() != eb->size()) throw EvalError("length mismatch");
    const std::size_t n = ea ? ea->size() : eb->size();
    std::vector<double> out(n);
    const double sa = ea ? 0.0 : a.to_real();
    const double sb = eb ? 0.0 : b.to_real();
    for (std::size_t i = 0; i < n; ++i) out[i] = scalar_op(op, ea ? (*ea)[i] : sa, eb ? (*eb)[i] : sb);
    return with_elements(ea ? a : b, std::move(out));
}

bool compare(BinaryOp op, const Value& a, const Value& b) {
    if (a.is<bool>()) return (a.as<bool>() == b.as<bool>()) == (op == BinaryOp::Eq);
    if (a.is<std::int64_t>() && b.is<std::int64_t>()) {
        const auto x = a.as<std::int64_t>(), y = b.as<std::int64_t>();
        switch (op) {
        case BinaryOp::Lt: return x < y;
        case BinaryOp::Le: return x <= y;
        case BinaryOp::Gt: return x > y;
        case BinaryOp::Ge: return x >= y;
        case BinaryOp::Eq: return x == y;
        default: return x != y;
        }
    }
    if (!a.is_scalar() || !b.is_scalar())
        throw TypeError("type mismatch: comparison requires scalars, got " + std::string(kind_name(a.kind())) + " and " +
                        kind_name(b.kind()));
    const double x = a.to_real(), y = b.to_real();
    switch (op) {
    case BinaryOp::Lt: return x < y;
    case BinaryOp::Le: return x <= y;
    case BinaryOp::Gt: return x > y;
    case BinaryOp::Ge: return x >= y;
    case BinaryOp::Eq: return x == y;
    default: return x != y;
    }
}

Value multiply_values(const Value& a, const Value& b) {
    if (a.is<Matrix>() && b.is<Matrix>()) return multiply(a.as<Matrix>(), b.as<Matrix>());
    if (a.is<Matrix>() && b.is<Vector>()) {
        const auto& m = a.as<Matrix>();
        const auto& v = b.as<Vector>();
        if (m.cols() != v.size()) throw EvalError("length mismatch in matrix * vector");
        Vector out(m.rows(), 0.0);
        for (std::size_t r = 0; r < m.rows(); ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < m.cols(); ++c) s += m(r, c) * v[c];
            out[r] = s;
        }
        if (m.rows() == 1) return out[0];
        return out;
    }
    if (a.is<std::int64_t>() && b.is<std::int64_t>())
        return checked_int(BinaryOp::Mul, a.as<std::int64_t>(), b.as<std::int64_t>());
    return componentwise(BinaryOp::Mul, a, b);
}

Value arithmetic(BinaryOp op, const Value& a, const Value& b) {
    rules::binary(op, type_of(a), type_of(b));
    if (op == BinaryOp::Mul) return multiply_values(a, b);
    if ((op == BinaryOp::Add || op == BinaryOp::Sub) && a.is<std::int64_t>() && b.is<std::int64_t>())
        return checked_int(op, a.as<std::int64_t>(), b.as<std::int64_t>());
    return componentwise(op, a, b);
}

Value negate(const Value& v) {
    if (v.is<std::int64_t>()) return checked_int(BinaryOp::Sub, 0, v.as<std::int64_t>());
    if (v.is<double>()) return -v.as<double>();
    std::vector<double> out = *elements(v);
    for (double& d : out) d = -d;
    return with_elements(v, std::move(out));
}

Value cross_values(const Value& a, const Value& b) {
    rules::cross(type_of(a), type_of(b));
    const auto& x = a.as<Vector>();
    const auto& y = b.as<Vector>();
    return Vector{x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]};
}

class Evaluator {
  public:
    explicit Evaluator(const Env& env) : env_(env) {}

    Value operator()(const Expr& e) const {
        Value v = std::visit([&](const auto& n) { return visit(n); }, e.node());
        require_finite(v, "formula");
        return v;
    }

  private:
    Value visit(const Expr::Literal& n) const { return n.value; }

    Value visit(const Expr::Variable& n) const {
        if (find_builtin(n.name)) return FunctionRef::builtin(n.name);
        if (const Value* v = env_.find(n.name)) return *v;
        if (const FunctionRef* f = env_.find_function(n.name)) return *f;
        throw TypeError("unknown variable '" + n.name + "'");
    }

    Value visit(const Expr::Unary& n) const {
        const Value v = (*this)(n.operand);
        rules::unary(n.op, type_of(v));
        switch (n.op) {
        case UnaryOp::Negate: return negate(v);
        case UnaryOp::Not: return !v.as<bool>();
        case UnaryOp::Transpose:
            if (v.is<Vector>()) return Matrix(1, v.as<Vector>().size(), v.as<Vector>());
            return transpose(v.as<Matrix>());
        case UnaryOp::Inverse: return inverse(v.as<Matrix>());
        }
        throw EvalError("internal: unknown unary operator");
    }

    Value visit(const Expr::Binary& n) const {
        if (n.op == BinaryOp::And || n.op == BinaryOp::Or) {
            const Value a = (*this)(n.lhs);
            if (!a.is<bool>()) throw TypeError(std::string("type mismatch: ") + op_symbol(n.op) + " on " + kind_name(a.kind()));
            if (a.as<bool>() == (n.op == BinaryOp::Or)) return a;
            const Value b = (*this)(n.rhs);
            rules::binary(n.op, type_of(a), type_of(b));
            return b;
        }
        const Value a = (*this)(n.lhs);
        const Value b = (*this)(n.rhs);
        switch (n.op) {
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge:
        case BinaryOp::Eq:
        case BinaryOp::Ne: rules::binary(n.op, type_of(a), type_of(b)); return compare(n.op, a, b);
        default: return arithmetic(n.op, a, b);
        }
    }

    Value visit(const Expr::Call& n) const {
        std::vector<Value> args;
        args.reserve(n.args.size());
        for (const auto& a : n.args) args.push_back((*this)(a));

        if (const auto* name = std::get_if<std::string>(&n.callee)) {
            if (*name == "cross") return cross_values(args.at(0), args.at(1));
            if (find_builtin(*name)) return FunctionRef::builtin(*name)(args);
            if (const FunctionRef* f = env_.find_function(*name)) return (*f)(args);
            if (const Value* v = env_.find(*name)) {
                if (!v->is<FunctionRef>()) throw TypeError("'" + *name + "' is not callable");
                return v->as<FunctionRef>()(args);
            }
            throw TypeError("unknown variable '" + *name + "'");
        }
        const Value callee = (*this)(std::get<Expr>(n.callee));
        if (!callee.is<FunctionRef>()) throw TypeError("expression is not callable");
        return callee.as<FunctionRef>()(args);
    }

    Value visit(const Expr::Delta& n) const {
        rules::delta(type_of((*this)(n.arg)));
        return 0.0;
    }

    Value visit(const Expr::Array& n) const {
        std::vector<Value> el;
        std::vector<TypeTag> tags;
        for (const auto& e : n.elements) {
            el.push_back((*this)(e));
            tags.push_back(type_of(el.back()));
        }
        const TypeTag t = rules::array(tags);
        if (t.kind == TypeTag::Kind::Vector) {
            Vector v;
            for (const auto& x : el) v.push_back(x.to_real());
            return v;
        }
        std::vector<Vector> rows;
        for (const auto& x : el) rows.push_back(x.as<Vector>());
        return Matrix::from_rows(rows);
    }

    const Env& env_;
};

}  // namespace

Value eval(const Expr& e, const Env& env) { return Evaluator(env)(e); }

double eval_real(const Expr& e, const Env& env) {
    const Value v = eval(e, env);
    if (!v.is_scalar()) throw TypeError(std::string("expected a number, got ") + kind_name(v.kind()));
    return v.to_real();
}

}  // namespace vrf::formula
