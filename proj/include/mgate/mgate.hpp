#pragma once

// Umbrella header: the whole library in one include.

#include "basis.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "fields.hpp"
#include "haar.hpp"
#include "log.hpp"
#include "metrics.hpp"
#include "operators.hpp"
#include "oracle.hpp"
#include "process_map.hpp"
#include "scheme_params.hpp"
#include "solver.hpp"
#include "svg.hpp"
#include "sweep.hpp"
#include "validate.hpp"
