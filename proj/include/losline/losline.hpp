#pragma once

// Umbrella header.

#include "losline/analytic_los.hpp"
#include "losline/coverage.hpp"
#include "losline/errors.hpp"
#include "losline/estimate.hpp"
#include "losline/experiment.hpp"
#include "losline/gauss_legendre.hpp"
#include "losline/geometry.hpp"
#include "losline/parallel.hpp"
#include "losline/params.hpp"
#include "losline/poisson_tail.hpp"
#include "losline/rng.hpp"
#include "losline/sampling.hpp"
#include "losline/scenario_file.hpp"
#include "losline/simulator.hpp"
#include "losline/validate.hpp"
