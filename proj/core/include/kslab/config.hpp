#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kslab/coupling.hpp"
#include "kslab/mean_field_pde.hpp"

namespace kslab {

struct PlanSection {
  double particles = 1e4;
  double alpha_k = 0.01;
  double alpha_p = 0.05;
  std::optional<double> beta;
  std::optional<double> delta;
};

struct ChaosSection {
  std::size_t particles = 4096;
  std::size_t replications = 200;
  std::size_t directions = 64;
};

struct BenchSection {
  std::size_t particles = 10000;
  std::size_t steps = 10;
  double eps = 0.05;
};

/// Everything a CLI run needs. `coupling.sim` carries the particle settings,
/// `coupling.grid` and `coupling.pde_dt` the PDE settings.
struct RunConfig {
  CouplingConfig coupling{};
  PdeMode pde_mode = PdeMode::kMollified;
  PlanSection plan{};
  std::vector<std::size_t> fluctuation_particles{64, 256, 1024};
  std::vector<double> meanfield_eps{0.4, 0.2, 0.1};
  ChaosSection chaos{};
  BenchSection bench{};
};

/// Parses a JSON config document. Missing keys take defaults; lambda defaults
/// to eps_p^d/2. Throws ConfigError listing every unknown key (by path), type
/// error and constraint violation found.
RunConfig parse_config(const std::string& text);

/// Canonical JSON of the resolved config, used as the provenance echo.
/// The worker count is omitted because it never changes results.
std::string echo_config(const RunConfig& config);

std::string to_string(PdeMode mode);
std::string to_string(DriftMethod method);

}  // namespace kslab
