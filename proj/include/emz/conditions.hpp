#pragma once

#include <string>

#include "emz/potential.hpp"

namespace emz {

/// Structural checks a potential must pass before the rest of the machinery
/// applies. All diagnostics are evaluated on a symmetric grid of the given
/// halfwidth; witnesses are reported so a failure can be inspected.
struct ConditionReport {
  // C1: V' square-integrable against the Gibbs weight.
  bool c1_ok = false;
  double c1_grad_norm = 0.0;  // L2(mu_q) norm of V'

  // C2: W = |V'|^2/2 - V'' eventually increasing and unbounded on the grid.
  bool c2_ok = false;
  double c2_monotone_radius = 0.0;  // smallest r with W increasing for |q| >= r
  double c2_w_boundary = 0.0;       // min of W at the two boundary points

  // C3: ratio |V''| / (1 + |V'|) bounded; its grid maxima must stop growing.
  bool c3_ok = false;
  double c3_sup_ratio = 0.0;
  double c3_witness_q = 0.0;     // where the sup is attained
  bool c3_tail_rising = false;   // outer-band maxima still increasing at the edge

  double grid_halfwidth = 0.0;

  bool all_ok() const { return c1_ok && c2_ok && c3_ok; }
  std::string summary() const;
};

ConditionReport check_conditions(const Potential& potential, double beta, double grid_halfwidth,
                                 int grid_points = 4001);

}  // namespace emz
