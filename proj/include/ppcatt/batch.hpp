#pragma once

// Independent scenario runs, one log per input in input order.
//
// run_batch distributes scenarios over OpenMP threads; run_batch_serial is
// the reference it is tested against. Runs share nothing, so the two give
// identical logs.

#include <vector>

#include "ppcatt/simulator.hpp"

namespace ppcatt {

/// Like run(), but construction errors (invalid scenario, no envelope
/// solution) become a failure at step 0 instead of an exception.
SimLog run_guarded(const Scenario& scenario);

std::vector<SimLog> run_batch_serial(const std::vector<Scenario>& scenarios);
std::vector<SimLog> run_batch(const std::vector<Scenario>& scenarios);

/// Number of threads run_batch would use.
int batch_threads();

}  // namespace ppcatt
