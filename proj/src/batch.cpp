#include "ppcatt/batch.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ppcatt {

SimLog run_guarded(const Scenario& scenario) {
  try {
    return run(scenario);
  } catch (const std::exception& e) {
    SimLog log;
    log.scenario = scenario.name;
    log.controller = scenario.controller;
    log.dt = scenario.dt;
    log.failure = SimFailure{0, e.what()};
    return log;
  }
}

std::vector<SimLog> run_batch_serial(const std::vector<Scenario>& scenarios) {
  std::vector<SimLog> logs;
  logs.reserve(scenarios.size());
  for (const auto& s : scenarios) logs.push_back(run_guarded(s));
  return logs;
}

std::vector<SimLog> run_batch(const std::vector<Scenario>& scenarios) {
  std::vector<SimLog> logs(scenarios.size());
  const auto n = static_cast<long>(scenarios.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    logs[static_cast<std::size_t>(i)] = run_guarded(scenarios[static_cast<std::size_t>(i)]);
  }
  return logs;
}

int batch_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace ppcatt
