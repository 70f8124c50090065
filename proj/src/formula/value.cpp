#include "vrf/formula/value.hpp"

#include "vrf/error.hpp"

#include <charconv>
#include <cmath>
#include <utility>

namespace vrf::formula {

Matrix::Matrix(std::size_t rows, std::size_t cols) : Matrix(rows, cols, std::vector<double>(rows * cols, 0.0)) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows_ == 0 || cols_ == 0) throw EvalError("matrix dimensions must be positive");
    if (data_.size() != rows_ * cols_) throw EvalError("matrix element count does not match dimensions");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
    if (rows.empty() || rows.front().empty()) throw EvalError("matrix dimensions must be positive");
    const std::size_t cols = rows.front().size();
    std::vector<double> data;
    data.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        if (r.size() != cols) throw EvalError("matrix rows have unequal lengths");
        data.insert(data.end(), r.begin(), r.end());
    }
    return Matrix(rows.size(), cols, std::move(data));
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) t(c, r) = m(r, c);
    return t;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw TypeError("dimension mismatch: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                        " * " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            out(i, j) = s;
        }
    return out;
}

Matrix inverse(const Matrix& m) {
    if (!m.square()) throw TypeError("inv requires a square matrix");
    const std::size_t n = m.rows();
    Matrix a = m;
    Matrix inv = Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a(r, col)) > std::fabs(a(pivot, col))) pivot = r;
        if (!(std::fabs(a(pivot, col)) >= kSingularPivot)) throw EvalError("singular matrix");
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a(pivot, c), a(col, c));
                std::swap(inv(pivot, c), inv(col, c));
            }
        }
        const double p = a(col, col);
        for (std::size_t c = 0; c < n; ++c) {
            a(col, c) /= p;
            inv(col, c) /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a(r, c) -= f * a(col, c);
                inv(r, c) -= f * inv(col, c);
            }
        }
    }
    return inv;
}

double Value::to_real() const {
    if (is<double>()) return as<double>();
    if (is<std::int64_t>()) return static_cast<double>(as<std::int64_t>());
    throw TypeError(std::string("expected a number, got ") + kind_name(kind()));
}

const char* kind_name(ValueKind k) {
    switch (k) {
    case ValueKind::Boolean: return "Boolean";
    case ValueKind::Integer: return "Integer";
    case ValueKind::Real: return "Real";
    case ValueKind::Vector: return "Vector";
    case ValueKind::Matrix: return "Matrix";
    case ValueKind::Function: return "Function";
    }
    return "?";
}

std::string format_real(double d) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
    (void)ec;
    return std::string(buf, end);
}

namespace {

void append_row(std::string& out, const double* first, std::size_t n) {
    out += '[';
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ", ";
        out += format_real(first[i]);
    }
    out += ']';
}

}  // namespace

std::string to_string(const Value& v) {
    switch (v.kind()) {
    case ValueKind::Boolean: return v.as<bool>() ? "true" : "false";
    case ValueKind::Integer: return std::to_string(v.as<std::int64_t>());
    case ValueKind::Real: return format_real(v.as<double>());
    case ValueKind::Vector: {
        std::string s;
        append_row(s, v.as<Vector>().data(), v.as<Vector>().size());
        return s;
    }
    case ValueKind::Matrix: {
        const auto& m = v.as<Matrix>();
        std::string s = "[";
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r) s += ", ";
            append_row(s, m.data().data() + r * m.cols(), m.cols());
        }
        return s + "]";
    }
    case ValueKind::Function: {
        const auto& f = v.as<FunctionRef>();
        return "<function " + f.name() + "/" + std::to_string(f.arity()) + ">";
    }
    }
    return {};
}

void require_finite(const Value& v, const char* what) {
    auto check = [&](double d) {
        if (!std::isfinite(d)) throw NumericError(std::string("non-finite result in ") + what);
    };
    if (v.is<double>()) check(v.as<double>());
    else if (v.is<Vector>())
        for (double d : v.as<Vector>()) check(d);
    else if (v.is<Matrix>())
        for (double d : v.as<Matrix>().data()) check(d);
}

}  // namespace vrf::formula
