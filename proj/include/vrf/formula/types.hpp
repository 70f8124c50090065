#pragma once

#include "vrf/formula/expr.hpp"
#include "vrf/formula/value.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace vrf::formula {

/// Static type of a formula. Vector and matrix dimensions may be unknown;
/// `Unknown` stands for a numeric value whose shape cannot be decided
/// until evaluation.
struct TypeTag {
    enum class Kind { Boolean, Integer, Real, Vector, Matrix, Function, Unknown };

    Kind kind = Kind::Unknown;
    std::optional<std::size_t> rows;  ///< vector length or matrix rows
    std::optional<std::size_t> cols;  ///< matrix columns
    int arity = 0;                    ///< function arity

    static TypeTag boolean() { return {Kind::Boolean, std::nullopt, std::nullopt, 0}; }
    static TypeTag integer() { return {Kind::Integer, std::nullopt, std::nullopt, 0}; }
    static TypeTag real() { return {Kind::Real, std::nullopt, std::nullopt, 0}; }
    static TypeTag vector(std::optional<std::size_t> n = std::nullopt) { return {Kind::Vector, n, std::nullopt, 0}; }
    static TypeTag matrix(std::optional<std::size_t> r = std::nullopt, std::optional<std::size_t> c = std::nullopt) {
        return {Kind::Matrix, r, c, 0};
    }
    static TypeTag function(int arity) { return {Kind::Function, std::nullopt, std::nullopt, arity}; }
    static TypeTag unknown() { return {Kind::Unknown, std::nullopt, std::nullopt, 0}; }

    bool is_scalar() const { return kind == Kind::Integer || kind == Kind::Real; }

    /// Same kind, and every dimension equal or unknown on either side.
    /// Unknown unifies with any non-Boolean, non-Function tag.
    bool unifies_with(const TypeTag& other) const;

    /// Whether a runtime value of this kind conforms (dimensions checked
    /// when known).
    bool admits(const Value& v) const;

    friend bool operator==(const TypeTag&, const TypeTag&) = default;
};

std::string to_string(const TypeTag& t);

/// Inverse of to_string; `?` marks an unknown dimension. Throws TypeError on
/// anything else.
TypeTag parse_type_tag(std::string_view text);

/// Tag of a concrete value, with all dimensions known.
TypeTag type_of(const Value& v);

using TypeMap = std::map<std::string, TypeTag, std::less<>>;

/// Result type of `e` given the types of its free variables. Throws
/// TypeError on type or dimension mismatch or an unknown variable.
TypeTag infer(const Expr& e, const TypeMap& types);

}  // namespace vrf::formula
