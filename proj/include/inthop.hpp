#pragma once

#include "inthop/baselines.hpp"
#include "inthop/bench.hpp"
#include "inthop/counters.hpp"
#include "inthop/diagnostics.hpp"
#include "inthop/eigen_bounds.hpp"
#include "inthop/expr.hpp"
#include "inthop/inthop_solver.hpp"
#include "inthop/interval.hpp"
#include "inthop/line_search.hpp"
#include "inthop/problem.hpp"
#include "inthop/solver_types.hpp"
