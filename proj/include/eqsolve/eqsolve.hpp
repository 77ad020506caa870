#pragma once

// Umbrella header.

#include "eqsolve/cli.hpp"
#include "eqsolve/decomposition.hpp"
#include "eqsolve/errors.hpp"
#include "eqsolve/expression.hpp"
#include "eqsolve/graph.hpp"
#include "eqsolve/interval.hpp"
#include "eqsolve/oracle.hpp"
#include "eqsolve/parser.hpp"
#include "eqsolve/report.hpp"
#include "eqsolve/solver.hpp"
#include "eqsolve/system.hpp"
