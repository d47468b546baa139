#include "emz/langevin.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <thread>

#include "emz/errors.hpp"
#include "emz/gibbs.hpp"
#include "emz/rng.hpp"

namespace emz {

std::string to_string(Scheme scheme) {
  return scheme == Scheme::EulerMaruyama ? "euler-maruyama" : "baoab";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "euler-maruyama") return Scheme::EulerMaruyama;
  if (name == "baoab") return Scheme::Baoab;
  throw ConfigError("scheme: expected \"euler-maruyama\" or \"baoab\", got \"" + name + "\"");
}

TrajectoryStore::TrajectoryStore(double dt, std::int64_t n_steps, int n_replicas,
                                 bool fixed_init)
    : dt_(dt), n_steps_(n_steps), n_replicas_(n_replicas), fixed_init_(fixed_init) {
  data_.assign(static_cast<std::size_t>(n_replicas) *
                   static_cast<std::size_t>(n_steps + 1) * 2,
               0.0);
}

namespace {

constexpr char kMagic[8] = {'E', 'M', 'Z', 'T', 'R', 'J', '0', '1'};

void require_little_endian() {
  if constexpr (std::endian::native != std::endian::little)
    throw IoError("trajectory io: only little-endian hosts are supported");
}

void validate(const SimConfig& cfg) {
  if (!(cfg.beta > 0)) throw ConfigError("simulate: beta must be positive");
  if (!(cfg.dt > 0)) throw ConfigError("simulate: dt must be positive");
  if (cfg.n_steps < 1) throw ConfigError("simulate: n_steps must be at least 1");
  if (cfg.n_replicas < 1) throw ConfigError("simulate: n_replicas must be at least 1");
  if (cfg.gamma < 0 || (cfg.gamma == 0 && !cfg.allow_zero_gamma))
    throw ConfigError("simulate: gamma must be positive");
}

struct ReplicaFailure {
  bool failed = false;
  int replica = 0;
  std::int64_t step = 0;
};

void run_replica(const SimConfig& cfg, const GibbsMeasure* eq, int replica,
                 TrajectoryStore& store, ReplicaFailure& failure) {
  CounterRng rng(cfg.seed, static_cast<std::uint64_t>(replica));

  double q, p;
  if (cfg.init_points.empty()) {
    eq->sample(rng, q, p);
  } else {
    const auto& pt = cfg.init_points[replica % cfg.init_points.size()];
    q = pt[0];
    p = pt[1];
  }
  store.set(replica, 0, q, p);

  const double dt = cfg.dt;
  const double gamma = cfg.gamma;
  const double sigma_dt = std::sqrt(2.0 * gamma / cfg.beta) * std::sqrt(dt);
  const double c1 = std::exp(-gamma * dt);
  const double c2 = std::sqrt((1.0 - c1 * c1) / cfg.beta);
  const double half = 0.5 * dt;

  for (std::int64_t k = 1; k <= cfg.n_steps; ++k) {
    if (cfg.scheme == Scheme::EulerMaruyama) {
      const double qn = q + p * dt;
      const double pn = p - (cfg.potential.grad(q) + gamma * p) * dt +
                        sigma_dt * rng.gaussian();
      q = qn;
      p = pn;
    } else {
      p -= half * cfg.potential.grad(q);
      q += half * p;
      p = c1 * p + c2 * rng.gaussian();
      q += half * p;
      p -= half * cfg.potential.grad(q);
    }
    if (!std::isfinite(q) || !std::isfinite(p)) {
      failure = {true, replica, k};
      return;
    }
    store.set(replica, k, q, p);
  }
}

}  // namespace

TrajectoryStore integrate(const SimConfig& cfg, int n_threads) {
  validate(cfg);
  if (n_threads < 1) n_threads = 1;

  // One shared equilibrium sampler; replicas only read it.
  std::unique_ptr<GibbsMeasure> eq;
  if (cfg.init_points.empty()) {
    const double hw = suggested_halfwidth(cfg.potential, cfg.beta, 16);
    eq = std::make_unique<GibbsMeasure>(cfg.potential, cfg.beta, hw,
                                        std::max(1024, suggested_quad_nodes(16)));
  }

  TrajectoryStore store(cfg.dt, cfg.n_steps, cfg.n_replicas, !cfg.init_points.empty());
  std::vector<ReplicaFailure> failures(cfg.n_replicas);

  if (n_threads == 1 || cfg.n_replicas == 1) {
    for (int r = 0; r < cfg.n_replicas; ++r)
      run_replica(cfg, eq.get(), r, store, failures[r]);
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= cfg.n_replicas) return;
        run_replica(cfg, eq.get(), r, store, failures[r]);
      }
    };
    std::vector<std::thread> pool;
    const int count = std::min(n_threads, cfg.n_replicas);
    pool.reserve(count);
    for (int i = 0; i < count; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (const auto& f : failures)
    if (f.failed)
      throw NumericsError("simulate: non-finite state at replica " +
                          std::to_string(f.replica) + ", step " +
                          std::to_string(f.step) +
                          " (time step too large for this potential?)");
  return store;
}

void TrajectoryStore::save(const std::string& path) const {
  require_little_endian();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("trajectory save: cannot open " + path);

  const std::uint32_t dims = 2;
  const std::int64_t steps = n_steps_;
  const std::uint32_t replicas = static_cast<std::uint32_t>(n_replicas_);
  const std::uint8_t fixed = fixed_init_ ? 1 : 0;
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(&dt_), sizeof dt_);
  out.write(reinterpret_cast<const char*>(&steps), sizeof steps);
  out.write(reinterpret_cast<const char*>(&replicas), sizeof replicas);
  out.write(reinterpret_cast<const char*>(&fixed), sizeof fixed);
  out.write(reinterpret_cast<const char*>(data_.data()),
            static_cast<std::streamsize>(data_.size() * sizeof(double)));
  if (!out) throw IoError("trajectory save: short write to " + path);
}

TrajectoryStore TrajectoryStore::load(const std::string& path) {
  require_little_endian();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("trajectory load: cannot open " + path);

  char magic[8];
  std::uint32_t dims = 0;
  double dt = 0.0;
  std::int64_t steps = 0;
  std::uint32_t replicas = 0;
  std::uint8_t fixed = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&dims), sizeof dims);
  in.read(reinterpret_cast<char*>(&dt), sizeof dt);
  in.read(reinterpret_cast<char*>(&steps), sizeof steps);
  in.read(reinterpret_cast<char*>(&replicas), sizeof replicas);
  in.read(reinterpret_cast<char*>(&fixed), sizeof fixed);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw IoError("trajectory load: " + path + " is not a trajectory file");
  if (dims != 2)
    throw IoError("trajectory load: unsupported phase-space dimension " +
                  std::to_string(dims));
  if (steps < 1 || replicas < 1 || !(dt > 0))
    throw IoError("trajectory load: corrupt header in " + path);

  TrajectoryStore store(dt, steps, static_cast<int>(replicas), fixed != 0);
  in.read(reinterpret_cast<char*>(store.data_.data()),
          static_cast<std::streamsize>(store.data_.size() * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != store.data_.size() * sizeof(double))
    throw IoError("trajectory load: truncated payload in " + path);
  return store;
}

}  // namespace emz
