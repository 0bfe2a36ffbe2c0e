#pragma once

// Umbrella header for the whole library.

#include "ubatch/combined.hpp"
#include "ubatch/divergence.hpp"
#include "ubatch/experiments.hpp"
#include "ubatch/family.hpp"
#include "ubatch/math_util.hpp"
#include "ubatch/oracle.hpp"
#include "ubatch/predictor.hpp"
#include "ubatch/solver.hpp"
#include "ubatch/supervised.hpp"
