#include <cmath>
#include <cstdint>
#include <vector>

#include "emz/errors.hpp"
#include "emz/langevin.hpp"

namespace emz {

namespace {

// Pairwise sum over replicas in index order: associativity is fixed, so the
// reduction is bitwise reproducible and carries no thread-count dependence.
Eigen::MatrixXd pairwise_sum(const std::vector<Eigen::MatrixXd>& terms, std::size_t lo,
                             std::size_t hi) {
  if (hi - lo == 1) return terms[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(terms, lo, mid) + pairwise_sum(terms, mid, hi);
}

}  // namespace

AcfEstimate ensemble_acf(const TrajectoryStore& store,
                         const std::vector<Observable>& observables,
                         std::int64_t max_lag, int stride) {
  if (observables.empty()) throw DomainError("ensemble_acf: no observables given");
  if (stride < 1) throw DomainError("ensemble_acf: stride must be at least 1");
  if (max_lag < 0) throw DomainError("ensemble_acf: max_lag must be nonnegative");
  if (max_lag % stride != 0)
    throw DomainError("ensemble_acf: max_lag must be a multiple of stride");

  const std::int64_t n_samples = store.n_samples();
  const std::int64_t discard = store.fixed_init() ? n_samples / 10 : 0;
  const std::int64_t usable = n_samples - discard;
  if (max_lag >= usable)
    throw DomainError("ensemble_acf: max_lag " + std::to_string(max_lag) +
                      " reaches past the usable trajectory length " +
                      std::to_string(usable));

  const int n_obs = static_cast<int>(observables.size());
  const int n_rep = store.n_replicas();
  const std::int64_t m_s = (usable - 1) / stride + 1;  // strided samples kept
  const std::int64_t n_out = max_lag / stride + 1;

  // Per-replica ACF, then fixed-order reduction across replicas.
  std::vector<std::vector<Eigen::MatrixXd>> per_replica(
      n_rep, std::vector<Eigen::MatrixXd>(n_out));

  for (int r = 0; r < n_rep; ++r) {
    Eigen::ArrayXXd y(m_s, n_obs);
    for (std::int64_t m = 0; m < m_s; ++m) {
      const std::int64_t k = discard + m * stride;
      const double qv = store.q(r, k);
      const double pv = store.p(r, k);
      for (int i = 0; i < n_obs; ++i) y(m, i) = observables[i].eval(qv, pv);
    }
    for (std::int64_t k = 0; k < n_out; ++k) {
      Eigen::MatrixXd c(n_obs, n_obs);
      const std::int64_t count = m_s - k;
      for (int i = 0; i < n_obs; ++i)
        for (int j = 0; j < n_obs; ++j)
          c(i, j) = (y.col(i).segment(k, count) * y.col(j).segment(0, count)).sum() /
                    static_cast<double>(count);
      per_replica[r][k] = std::move(c);
    }
  }

  AcfEstimate est;
  est.n_replicas = n_rep;
  est.t.resize(n_out);
  for (std::int64_t k = 0; k < n_out; ++k)
    est.t(k) = static_cast<double>(k * stride) * store.dt();
  est.values.resize(n_out);
  est.se.resize(n_out);
  est.names.reserve(observables.size());
  for (const auto& o : observables) est.names.push_back(o.name);

  std::vector<Eigen::MatrixXd> terms(n_rep);
  for (std::int64_t k = 0; k < n_out; ++k) {
    for (int r = 0; r < n_rep; ++r) terms[r] = per_replica[r][k];
    const Eigen::MatrixXd mean = pairwise_sum(terms, 0, terms.size()) / n_rep;
    est.values[k] = mean;
    if (n_rep > 1) {
      for (int r = 0; r < n_rep; ++r)
        terms[r] = (per_replica[r][k] - mean).cwiseAbs2();
      const Eigen::MatrixXd var = pairwise_sum(terms, 0, terms.size());
      est.se[k] = (var / (static_cast<double>(n_rep) * (n_rep - 1))).cwiseSqrt();
    } else {
      est.se[k] = Eigen::MatrixXd::Zero(n_obs, n_obs);
    }
  }
  return est;
}

}  // namespace emz
