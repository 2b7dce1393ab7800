#pragma once

#include "pathineq/bounds.hpp"
#include "pathineq/error.hpp"
#include "pathineq/exact_oracles.hpp"
#include "pathineq/functionals.hpp"
#include "pathineq/graph_core.hpp"
#include "pathineq/mc_sim.hpp"
#include "pathineq/metric_paths.hpp"
#include "pathineq/rng.hpp"
#include "pathineq/symmetry.hpp"
#include "pathineq/transport.hpp"
#include "pathineq/wopt.hpp"
