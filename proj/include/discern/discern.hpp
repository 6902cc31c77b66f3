#pragma once

#include "discern/errors.hpp"
#include "discern/state_space.hpp"
#include "discern/dag.hpp"
#include "discern/factorize.hpp"
#include "discern/transition.hpp"
#include "discern/beliefs.hpp"
#include "discern/market.hpp"
#include "discern/solution.hpp"
#include "discern/solver.hpp"
#include "discern/analysis.hpp"
#include "discern/scenarios.hpp"
#include "discern/random_specs.hpp"
#include "discern/io.hpp"
