#pragma once

// Umbrella header for the entropy estimation library.

#include "entropy/distribution.hpp"
#include "entropy/estimators.hpp"
#include "entropy/evaluation.hpp"
#include "entropy/information.hpp"
#include "entropy/io.hpp"
#include "entropy/quadrature.hpp"
#include "entropy/rng.hpp"
#include "entropy/special_functions.hpp"
#include "entropy/studentized_range.hpp"
