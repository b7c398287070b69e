#pragma once

#include "dtrans/engine.hpp"

namespace dtrans {

// Virtual-time replay of the run's communication and compute pattern.
// Fills the timing members of `res`. Throws DeadlockError if workers are
// left waiting with nothing in flight.
void simulate_timing(const StencilProgram &program, const RunConfig &cfg, RunResult &res);

}  // namespace dtrans
