#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace vrf::formula {

using Vector = std::vector<double>;

/// Dense row-major matrix of reals with positive dimensions.
class Matrix {
  public:
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(const std::vector<Vector>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

  private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

Matrix transpose(const Matrix& m);
Matrix multiply(const Matrix& a, const Matrix& b);

/// Gauss-Jordan inversion with partial pivoting. Throws EvalError when a
/// pivot's magnitude drops below `kSingularPivot`.
Matrix inverse(const Matrix& m);

inline constexpr double kSingularPivot = 1e-12;

class Value;

/// A function value: either a built-in, a composition of functions with
/// scalar constants, or a host-supplied scalar procedure. All function
/// values act elementwise on vector and matrix arguments.
class FunctionRef {
  public:
    using HostFn = std::function<double(std::span<const double>)>;

    /// An element of a composition: an inner function or a captured scalar.
    using Part = std::variant<FunctionRef, double>;

    static FunctionRef builtin(std::string_view name);
    static FunctionRef compose(const FunctionRef& outer, std::vector<Part> parts);
    static FunctionRef host(std::string name, int arity, HostFn fn);

    const std::string& name() const;
    int arity() const;

    /// Scalar evaluation at a point; `args.size()` must equal arity().
    double at(std::span<const double> args) const;

    /// Applies to formula values with broadcasting; function-valued
    /// arguments produce a composition.
    Value operator()(std::span<const Value> args) const;

    /// Identity comparison: two refs are equal when they share a node.
    friend bool operator==(const FunctionRef& a, const FunctionRef& b) { return a.node_ == b.node_; }

    struct Node;

  private:
    explicit FunctionRef(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

enum class ValueKind { Boolean, Integer, Real, Vector, Matrix, Function };

/// The currency of the formula engine.
class Value {
  public:
    using Storage = std::variant<bool, std::int64_t, double, Vector, Matrix, FunctionRef>;

    Value(bool b) : v_(b) {}
    Value(std::int64_t i) : v_(i) {}
    Value(int i) : v_(static_cast<std::int64_t>(i)) {}
    Value(double d) : v_(d) {}
    Value(Vector v) : v_(std::move(v)) {}
    Value(Matrix m) : v_(std::move(m)) {}
    Value(FunctionRef f) : v_(std::move(f)) {}

    ValueKind kind() const noexcept { return static_cast<ValueKind>(v_.index()); }
    const Storage& storage() const noexcept { return v_; }

    template <class T> bool is() const noexcept { return std::holds_alternative<T>(v_); }
    template <class T> const T& as() const { return std::get<T>(v_); }

    bool is_scalar() const noexcept { return is<std::int64_t>() || is<double>(); }
    /// Integer or Real as double; throws TypeError otherwise.
    double to_real() const;

    friend bool operator==(const Value&, const Value&) = default;

  private:
    Storage v_;
};

const char* kind_name(ValueKind k);

/// Canonical text: `14`, `true`, `[0, 0, 1]`, `[[1, 2], [3, 4]]`.
std::string to_string(const Value& v);

/// Shortest decimal text that reads back to the same double.
std::string format_real(double d);

/// Throws NumericError if any real inside `v` is NaN or infinite.
void require_finite(const Value& v, const char* what);

}  // namespace vrf::formula
