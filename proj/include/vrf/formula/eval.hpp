#pragma once

#include "vrf/formula/expr.hpp"
#include "vrf/formula/types.hpp"
#include "vrf/formula/value.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace vrf::formula {

/// Variable and function bindings. Lookups are case-sensitive; reserved
/// names (built-ins, `inv`, `cross`, `delta`) cannot be bound.
///
/// Single writer: clone the Env before mutating it from another thread.
class Env {
  public:
    void set(std::string name, Value v);
    void define_function(std::string name, FunctionRef f);

    const Value* find(std::string_view name) const;
    const FunctionRef* find_function(std::string_view name) const;

    /// Tags of every binding, suitable for infer().
    TypeMap types() const;

    const std::map<std::string, Value, std::less<>>& variables() const noexcept { return vars_; }

  private:
    std::map<std::string, Value, std::less<>> vars_;
    std::map<std::string, FunctionRef, std::less<>> funcs_;
};

/// Evaluates `e`. Pure and reentrant. Throws TypeError, EvalError (singular
/// matrix, division by zero, length mismatch) or NumericError (non-finite
/// result). `delta(...)` evaluates to 0.
Value eval(const Expr& e, const Env& env);

/// Evaluates and requires an Integer or Real result.
double eval_real(const Expr& e, const Env& env);

/// One impulse term `coefficient * delta(t - firing_time)`.
struct Impulse {
    Expr coefficient;
    Expr firing_time;
};

struct DeltaSplit {
    Expr smooth;
    std::vector<Impulse> impulses;
};

/// Separates top-level additive terms of the form `g * delta(t - c)` from
/// the rest. `c` must be constant; anything else containing a delta is an
/// EvalError ("malformed delta placement").
DeltaSplit extract_delta_terms(const Expr& e, std::string_view time_var = "t");

}  // namespace vrf::formula
