#pragma once

#include "sepq/concurrence.hpp"
#include "sepq/config.hpp"
#include "sepq/errors.hpp"
#include "sepq/isometry_feasibility.hpp"
#include "sepq/json_io.hpp"
#include "sepq/oracles.hpp"
#include "sepq/pipeline.hpp"
#include "sepq/quantum_state.hpp"
#include "sepq/xl_solver.hpp"
