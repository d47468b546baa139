#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "emz/langevin.hpp"

namespace emz {

struct BasisConfig {
  int n_q = 20;
  int n_p = 20;
  double domain_halfwidth = 0.0;  // 0 requests the suggested domain
  int quad_nodes = 0;             // 0 requests the suggested node count
};

struct TimeConfig {
  double t_max = 10.0;
  double dt_out = 0.01;
};

struct EnsembleConfig {
  double dt = 1e-3;
  std::int64_t n_steps = 100000;
  int n_replicas = 4;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::Baoab;
};

struct ToleranceConfig {
  double kernel_tol = 1e-8;
  double fit_tail_fraction = 0.5;
};

/// Fully resolved run description. Parsing validates the schema (unknown keys
/// are rejected with the offending key named), fills every default, and
/// resolves the quadrature domain and node count from the potential and basis
/// size, so the emitted form round-trips to an identical config.
struct RunConfig {
  Potential potential = Potential::harmonic(1.0);
  double beta = 1.0;
  double gamma = 1.0;
  BasisConfig basis;
  std::vector<Observable> observables;  // default: {p}
  TimeConfig time;
  EnsembleConfig ensemble;
  ToleranceConfig tolerances;
  std::string output_dir = "out";
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

/// Serialized resolved config (JSON text, stable key order).
std::string emit_config(const RunConfig& cfg);

}  // namespace emz
