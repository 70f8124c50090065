#include "vrf/formula/builtins.hpp"

#include <algorithm>
#include <cmath>

namespace vrf::formula {

namespace {

template <double (*F)(double)> double unary(std::span<const double> a) { return F(a[0]); }

double sign(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }
double sqr(double x) { return x * x; }
double abs_(double x) { return std::fabs(x); }
double sin_(double x) { return std::sin(x); }
double cos_(double x) { return std::cos(x); }
double tan_(double x) { return std::tan(x); }
double asin_(double x) { return std::asin(x); }
double acos_(double x) { return std::acos(x); }
double atan_(double x) { return std::atan(x); }
double exp_(double x) { return std::exp(x); }
double ln_(double x) { return std::log(x); }
double sqrt_(double x) { return std::sqrt(x); }
double floor_(double x) { return std::floor(x); }

double atan2_(std::span<const double> a) { return std::atan2(a[0], a[1]); }
double min_(std::span<const double> a) { return std::min(a[0], a[1]); }
double max_(std::span<const double> a) { return std::max(a[0], a[1]); }

}  // namespace

const std::vector<Builtin>& builtins() {
    static const std::vector<Builtin> table = {
        {"sin", 1, unary<sin_>},   {"cos", 1, unary<cos_>},     {"tan", 1, unary<tan_>},
        {"asin", 1, unary<asin_>}, {"acos", 1, unary<acos_>},   {"atan", 1, unary<atan_>},
        {"atan2", 2, atan2_},      {"exp", 1, unary<exp_>},     {"ln", 1, unary<ln_>},
        {"sqrt", 1, unary<sqrt_>}, {"abs", 1, unary<abs_>},     {"sign", 1, unary<sign>},
        {"min", 2, min_},          {"max", 2, max_},            {"floor", 1, unary<floor_>},
        {"sqr", 1, unary<sqr>},
    };
    return table;
}

const Builtin* find_builtin(std::string_view name) {
    for (const auto& b : builtins())
        if (b.name == name) return &b;
    return nullptr;
}

bool is_reserved(std::string_view name) {
    return find_builtin(name) != nullptr || name == "inv" || name == "cross" || name == "delta" ||
           name == "true" || name == "false";
}

}  // namespace vrf::formula
