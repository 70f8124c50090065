#pragma once

#include "vrf/formula/builtins.hpp"
#include "vrf/formula/eval.hpp"
#include "vrf/formula/expr.hpp"
#include "vrf/formula/types.hpp"
#include "vrf/formula/value.hpp"
