#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "emz/observable.hpp"
#include "emz/potential.hpp"

namespace emz {

enum class Scheme { EulerMaruyama, Baoab };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

/// One-particle underdamped Langevin run:
///   dq = p dt,  dp = (-V'(q) - gamma p) dt + sigma dW,  sigma = sqrt(2 gamma / beta).
///
/// The noise amplitude is always derived from (gamma, beta); it is not a free
/// parameter. Replicas draw from independent counter-based streams keyed by
/// (seed, replica index), so results are bitwise reproducible under any
/// thread count.
struct SimConfig {
  Potential potential = Potential::harmonic(1.0);
  double beta = 1.0;
  double gamma = 1.0;
  double dt = 1e-3;
  std::int64_t n_steps = 0;
  int n_replicas = 1;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::Baoab;
  /// Empty: every replica starts from an equilibrium draw. Otherwise replicas
  /// start from the listed (q, p) points, cycling through the list.
  std::vector<std::array<double, 2>> init_points;
  /// Test-only override: accept gamma == 0 (pure Hamiltonian flow) so the
  /// deterministic limit of the integrators can be checked.
  bool allow_zero_gamma = false;
};

/// Phase-space samples of every replica, replica-major, (q, p) interleaved.
/// Sample k of replica r is the state after k steps; there are n_steps + 1
/// samples per replica.
class TrajectoryStore {
 public:
  TrajectoryStore() = default;
  TrajectoryStore(double dt, std::int64_t n_steps, int n_replicas, bool fixed_init);

  double dt() const { return dt_; }
  std::int64_t n_steps() const { return n_steps_; }
  std::int64_t n_samples() const { return n_steps_ + 1; }
  int n_replicas() const { return n_replicas_; }
  /// True when the run started from caller-supplied points rather than the
  /// equilibrium sampler; estimators then discard an equilibration prefix.
  bool fixed_init() const { return fixed_init_; }

  double q(int replica, std::int64_t k) const { return data_[offset(replica, k)]; }
  double p(int replica, std::int64_t k) const { return data_[offset(replica, k) + 1]; }
  void set(int replica, std::int64_t k, double q, double p) {
    const std::size_t o = offset(replica, k);
    data_[o] = q;
    data_[o + 1] = p;
  }

  const std::vector<double>& raw() const { return data_; }

  /// Binary persistence. Header: magic, dims, dt, steps, replica count, init
  /// flag; payload: little-endian 64-bit floats, replica-major, (q, p)
  /// interleaved.
  void save(const std::string& path) const;
  static TrajectoryStore load(const std::string& path);

 private:
  std::size_t offset(int replica, std::int64_t k) const {
    return (static_cast<std::size_t>(replica) * static_cast<std::size_t>(n_samples()) +
            static_cast<std::size_t>(k)) *
           2;
  }

  double dt_ = 0.0;
  std::int64_t n_steps_ = 0;
  int n_replicas_ = 0;
  bool fixed_init_ = false;
  std::vector<double> data_;
};

/// Integrate the configured ensemble. Replicas are independent and may run on
/// several threads; the result does not depend on the thread count.
TrajectoryStore integrate(const SimConfig& cfg, int n_threads = 1);

/// Stationary autocorrelation estimate from a replica ensemble.
/// values[k](i, j) estimates <o_i(t_k) o_j(0)> at lag t_k; se holds the
/// entrywise standard error from the replica scatter (zero when there is only
/// one replica).
struct AcfEstimate {
  Eigen::VectorXd t;
  std::vector<Eigen::MatrixXd> values;
  std::vector<Eigen::MatrixXd> se;
  int n_replicas = 0;
  std::vector<std::string> names;
};

/// Time-origin averaged ACF up to max_lag raw steps, sampled every `stride`
/// steps (lags come out on the grid k * stride * dt). When the store was
/// started from fixed points the first 10% of each replica is discarded as
/// equilibration; equilibrium-sampled runs keep everything. Replica results
/// are combined with a fixed-order pairwise reduction, so repeated runs agree
/// bitwise.
AcfEstimate ensemble_acf(const TrajectoryStore& store,
                         const std::vector<Observable>& observables,
                         std::int64_t max_lag, int stride = 1);

}  // namespace emz
