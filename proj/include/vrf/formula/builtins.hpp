#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace vrf::formula {

struct Builtin {
    std::string_view name;
    int arity;
    double (*fn)(std::span<const double>);
};

/// sin cos tan asin acos atan atan2 exp ln sqrt abs sign min max floor sqr
const std::vector<Builtin>& builtins();
const Builtin* find_builtin(std::string_view name);

/// Built-in names plus the special forms `inv`, `cross`, `delta` and the
/// literals `true`/`false`. None of these may be bound in an Env.
bool is_reserved(std::string_view name);

}  // namespace vrf::formula
