#pragma once

#include "ipbmr/bench.hpp"
#include "ipbmr/budget.hpp"
#include "ipbmr/formula.hpp"
#include "ipbmr/path_breaking.hpp"
#include "ipbmr/rng.hpp"
#include "ipbmr/score_state.hpp"
#include "ipbmr/solver.hpp"
#include "ipbmr/verify.hpp"
