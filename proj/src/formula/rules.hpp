#pragma once

// Typing rules shared by infer() and eval(). eval() derives the tag of each
// runtime operand and runs the same rule before computing, so a successful
// evaluation always produces a value of the inferred kind.

#include "vrf/formula/types.hpp"

#include <span>
#include <string_view>

namespace vrf::formula::rules {

TypeTag unary(UnaryOp op, const TypeTag& a);
TypeTag binary(BinaryOp op, const TypeTag& a, const TypeTag& b);
TypeTag elementwise_call(std::string_view callee, int arity, std::span<const TypeTag> args);
TypeTag cross(const TypeTag& a, const TypeTag& b);
TypeTag delta(const TypeTag& a);
TypeTag array(std::span<const TypeTag> elements);

}  // namespace vrf::formula::rules
