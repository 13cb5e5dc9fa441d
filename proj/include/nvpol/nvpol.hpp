#pragma once

// umbrella header

#include "nvpol/constants.hpp"
#include "nvpol/vec3.hpp"
#include "nvpol/errors.hpp"
#include "nvpol/hyperfine.hpp"
#include "nvpol/environment.hpp"
#include "nvpol/lattice.hpp"
#include "nvpol/grid.hpp"
#include "nvpol/coherence.hpp"
#include "nvpol/estimator.hpp"
#include "nvpol/oracle.hpp"
#include "nvpol/io.hpp"
#include "nvpol/fixtures.hpp"
#include "nvpol/run_config.hpp"
