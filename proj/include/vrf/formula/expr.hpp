#pragma once

#include "vrf/formula/value.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vrf::formula {

enum class UnaryOp { Negate, Not, Transpose, Inverse };

enum class BinaryOp { Add, Sub, Mul, Div, Pow, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

const char* op_symbol(BinaryOp op);

/// Immutable expression tree. Copies share structure.
class Expr {
  public:
    struct Literal;
    struct Variable;
    struct Unary;
    struct Binary;
    struct Call;
    struct Delta;
    struct Array;

    using Node = std::variant<Literal, Variable, Unary, Binary, Call, Delta, Array>;

    static Expr literal(Value v);
    static Expr variable(std::string name);
    static Expr unary(UnaryOp op, Expr operand);
    static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
    static Expr call(std::string name, std::vector<Expr> args);
    static Expr call(Expr callee, std::vector<Expr> args);
    static Expr delta(Expr arg);
    /// Arrays of plain (possibly negated) numbers fold to a literal vector;
    /// arrays of equal-length literal vectors fold to a literal matrix.
    static Expr array(std::vector<Expr> elements);

    const Node& node() const noexcept;
    template <class T> const T* get() const noexcept;

    /// Structural equality.
    friend bool operator==(const Expr& a, const Expr& b);

  private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

struct Expr::Literal {
    Value value;
};
struct Expr::Variable {
    std::string name;
};
struct Expr::Unary {
    UnaryOp op;
    Expr operand;
};
struct Expr::Binary {
    BinaryOp op;
    Expr lhs;
    Expr rhs;
};
/// Callee is either a name (built-in or bound function) or an expression
/// evaluating to a function value.
struct Expr::Call {
    std::variant<std::string, Expr> callee;
    std::vector<Expr> args;
};
struct Expr::Delta {
    Expr arg;
};
/// `[e1, e2, ...]`: a vector of scalars or a matrix of equal-length rows.
struct Expr::Array {
    std::vector<Expr> elements;
};

inline const Expr::Node& Expr::node() const noexcept { return *node_; }
template <class T> const T* Expr::get() const noexcept { return std::get_if<T>(node_.get()); }

inline bool operator==(const Expr::Literal& a, const Expr::Literal& b) { return a.value == b.value; }
inline bool operator==(const Expr::Variable& a, const Expr::Variable& b) { return a.name == b.name; }
inline bool operator==(const Expr::Unary& a, const Expr::Unary& b) { return a.op == b.op && a.operand == b.operand; }
inline bool operator==(const Expr::Binary& a, const Expr::Binary& b) {
    return a.op == b.op && a.lhs == b.lhs && a.rhs == b.rhs;
}
inline bool operator==(const Expr::Call& a, const Expr::Call& b) { return a.callee == b.callee && a.args == b.args; }
inline bool operator==(const Expr::Delta& a, const Expr::Delta& b) { return a.arg == b.arg; }
inline bool operator==(const Expr::Array& a, const Expr::Array& b) { return a.elements == b.elements; }

/// Parses formula text. Precedence, loosest first: `||`, `&&`, comparisons,
/// `+ -`, `* /`, `^` (right associative), prefix `-` `!`, postfix `'` and
/// calls. Throws ParseError with the byte offset of the offending token.
Expr parse(std::string_view text);

/// Canonical text: one space around binary operators, none inside calls.
std::string to_string(const Expr& e);

/// Identifiers that are not built-ins, including names used as callees.
std::set<std::string> free_variables(const Expr& e);

/// Replaces variables by expressions (simultaneously).
Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings);

/// True when the expression contains a delta term anywhere.
bool contains_delta(const Expr& e);

}  // namespace vrf::formula
