#pragma once

// Umbrella header for the dyskew library: adaptive data-link state machines,
// skew-detection models, routing, the deterministic simulator and the
// experiment toolkit.

#include "dyskew/config.hpp"
#include "dyskew/core.hpp"
#include "dyskew/experiment.hpp"
#include "dyskew/network.hpp"
#include "dyskew/prng.hpp"
#include "dyskew/report.hpp"
#include "dyskew/routing.hpp"
#include "dyskew/simulator.hpp"
#include "dyskew/skew_models.hpp"
#include "dyskew/state_machine.hpp"
#include "dyskew/workload.hpp"
