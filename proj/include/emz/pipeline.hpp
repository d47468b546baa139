#pragma once

#include <string>
#include <vector>

#include "emz/config.hpp"

namespace emz {

/// Subcommand names accepted by run_pipeline, in pipeline order.
const std::vector<std::string>& pipeline_subcommands();

/// Execute one pipeline stage and write its artifacts under cfg.output_dir
/// (created if absent). Every stage rewrites resolved_config.json first.
///
/// Stages and their artifacts:
///   check    -> conditions.json
///   spectrum -> spectrum_K.csv, spectrum_QKQ.csv
///   kernel   -> kernel_galerkin.csv, force_galerkin.csv, acf_galerkin.csv,
///               kernel_galerkin.json
///   simulate -> trajectory.bin, simulate.json
///   extract  -> acf_trajectory.csv, kernel_volterra.csv, kernel_volterra.json
///               (runs simulate first when trajectory.bin is absent)
///   certify  -> certificate_K.json, certificate_QKQ.json
///   report   -> report.json (needs spectrum, kernel and certify artifacts;
///               the Volterra section is included when extract has run)
///
/// Module errors propagate as exceptions; a stage invoked before its
/// prerequisites reports ConfigError("missing dependency: <stage>").
void run_pipeline(const std::string& subcommand, const RunConfig& cfg, int n_threads = 1);

}  // namespace emz
