#include "emz/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "emz/errors.hpp"
#include "emz/gibbs.hpp"

namespace emz {

ConditionReport check_conditions(const Potential& potential, double beta, double grid_halfwidth,
                                 int grid_points) {
  if (!(grid_halfwidth > 0)) throw DomainError("conditions: grid halfwidth must be positive");
  if (grid_points < 101) throw DomainError("conditions: need at least 101 grid points");

  ConditionReport rep;
  rep.grid_halfwidth = grid_halfwidth;

  // C1: finite quadrature norm of V' (use a generous rule on the same domain).
  {
    GibbsMeasure mu(potential, beta, grid_halfwidth, 512);
    const double norm2 = mu.average([&](double q) {
      const double g = potential.grad(q);
      return g * g;
    });
    rep.c1_grad_norm = std::sqrt(norm2);
    rep.c1_ok = std::isfinite(rep.c1_grad_norm);
  }

  const int n = grid_points | 1;  // odd count so q = 0 is a grid point
  const double h = 2.0 * grid_halfwidth / (n - 1);
  std::vector<double> q(n), w(n), ratio(n);
  for (int i = 0; i < n; ++i) {
    q[i] = -grid_halfwidth + i * h;
    const double g = potential.grad(q[i]);
    const double hss = potential.hess(q[i]);
    w[i] = 0.5 * g * g - hss;
    ratio[i] = std::abs(hss) / (1.0 + std::abs(g));
  }

  // C2: find the smallest radius beyond which W increases with |q| on both
  // sides, and require W to be large and positive at the boundary.
  {
    const int mid = n / 2;
    int right = n - 1;
    while (right > mid && w[right] > w[right - 1]) --right;
    int left = 0;
    while (left < mid && w[left] > w[left + 1]) ++left;
    const double r_right = q[right];
    const double r_left = -q[left];
    rep.c2_monotone_radius = std::max(r_right, r_left);
    rep.c2_w_boundary = std::min(w[0], w[n - 1]);
    rep.c2_ok = rep.c2_monotone_radius < 0.9 * grid_halfwidth && rep.c2_w_boundary > 0.0 &&
                rep.c2_w_boundary > w[mid];
  }

  // C3: sup of the ratio, plus a trend test on geometric bands of the outer
  // region; a ratio still rising at the grid edge means no bound is visible.
  {
    int arg = 0;
    for (int i = 1; i < n; ++i)
      if (ratio[i] > ratio[arg]) arg = i;
    rep.c3_sup_ratio = ratio[arg];
    rep.c3_witness_q = q[arg];

    const int bands = 6;
    std::vector<double> band_max(bands, 0.0);
    // bands cover |q| in [L/2, L] geometrically
    for (int i = 0; i < n; ++i) {
      const double a = std::abs(q[i]);
      if (a < 0.5 * grid_halfwidth) continue;
      double frac = std::log2(a / (0.5 * grid_halfwidth));  // in [0, 1]
      int b = std::min(bands - 1, static_cast<int>(frac * bands));
      band_max[b] = std::max(band_max[b], ratio[i]);
    }
    rep.c3_tail_rising = true;
    for (int b = 0; b + 1 < bands; ++b)
      if (band_max[b + 1] <= band_max[b]) rep.c3_tail_rising = false;
    const double inner_max =
        *std::max_element(ratio.begin() + n / 4, ratio.begin() + (3 * n) / 4);
    rep.c3_ok = !rep.c3_tail_rising && band_max[bands - 1] <= std::max(inner_max, 1e-12) * 1.0001;
  }

  return rep;
}

std::string ConditionReport::summary() const {
  std::ostringstream os;
  os << "C1 " << (c1_ok ? "ok" : "FAIL") << " (|V'| norm " << c1_grad_norm << "); "
     << "C2 " << (c2_ok ? "ok" : "FAIL") << " (monotone radius " << c2_monotone_radius
     << ", W at boundary " << c2_w_boundary << "); "
     << "C3 " << (c3_ok ? "ok" : "FAIL") << " (sup ratio " << c3_sup_ratio << " at q = "
     << c3_witness_q << (c3_tail_rising ? ", still rising at grid edge" : "") << ")";
  return os.str();
}

}  // namespace emz
