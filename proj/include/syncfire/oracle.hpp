#pragma once

#include "syncfire/scenario.hpp"

#include <map>

namespace syncfire {

/// Closed-form fire instants for fully deterministic scenarios (zero jitter,
/// constant delays, no loss, 1 ns timer resolutions), computed from ground
/// truth only — true drifts and true link delays — without touching the
/// protocol implementation. Under symmetric delays every synced node lands
/// exactly on the master's scheduled instant; per-direction asymmetry shifts
/// a node by half the per-hop difference, accumulated along its path.
///
/// Returns the exact fire time per firing node (master included only when it
/// fires). Throws ConfigError for stochastic scenarios.
std::map<NodeIndex, Rat> analytic_oracle(const Scenario& scenario);

}  // namespace syncfire
