#include "emz/pipeline.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "emz/conditions.hpp"
#include "emz/errors.hpp"
#include "emz/gibbs.hpp"
#include "emz/hypo.hpp"
#include "emz/mori.hpp"
#include "emz/spectral.hpp"
#include "emz/volterra.hpp"
#include "json.hpp"

namespace emz {

namespace {

namespace fs = std::filesystem;
using njson = nlohmann::ordered_json;
using clock_t_ = std::chrono::steady_clock;

double seconds_since(clock_t_::time_point t0) {
  return std::chrono::duration<double>(clock_t_::now() - t0).count();
}

/// Shortest round-trip decimal form; locale-free, so CSV output is bitwise
/// reproducible.
std::string fmt(double x) {
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

njson jnum(double x) {
  if (std::isfinite(x)) return x;
  return fmt(x);  // "inf", "-inf", "nan": JSON has no literals for these
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("pipeline: cannot open \"" + path.string() + "\" for writing");
  out << content;
  if (!out) throw IoError("pipeline: short write to \"" + path.string() + "\"");
}

void write_json(const fs::path& path, const njson& j) { write_text(path, j.dump(2) + "\n"); }

njson read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("pipeline: cannot read \"" + path.string() + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return njson::parse(ss.str());
  } catch (const njson::parse_error& e) {
    throw IoError("pipeline: \"" + path.string() + "\" is not valid JSON: " + e.what());
  }
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Csv read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("pipeline: cannot read \"" + path.string() + "\"");
  Csv csv;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      csv.header = cells;
      first = false;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      try {
        row.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw IoError("pipeline: non-numeric cell \"" + c + "\" in " + path.string());
      }
    }
    csv.rows.push_back(std::move(row));
  }
  if (csv.header.empty())
    throw IoError("pipeline: \"" + path.string() + "\" has no header row");
  return csv;
}

class CsvBuilder {
 public:
  explicit CsvBuilder(std::vector<std::string> header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) body_ += ',';
      body_ += header[i];
    }
    body_ += '\n';
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) body_ += ',';
      body_ += fmt(values[i]);
    }
    body_ += '\n';
  }
  const std::string& str() const { return body_; }

 private:
  std::string body_;
};

njson matrix_json(const Eigen::MatrixXd& m) {
  njson rows = njson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    njson row = njson::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(jnum(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

njson fit_json(const DecayFit& f) {
  return njson{{"ok", f.ok},           {"rate", jnum(f.rate)},
               {"rate_se", jnum(f.rate_se)}, {"amplitude", jnum(f.amplitude)},
               {"residual", jnum(f.residual)}, {"points_used", f.points_used},
               {"message", f.message}};
}

/// Everything the operator-level stages share; built once per invocation.
struct Workspace {
  GalerkinBasis basis;
  OperatorSet ops;

  Workspace(const RunConfig& cfg)
      : basis(GibbsMeasure(cfg.potential, cfg.beta, cfg.basis.domain_halfwidth,
                           cfg.basis.quad_nodes),
              cfg.basis.n_q, cfg.basis.n_p),
        ops(assemble_operators(basis, cfg.gamma)) {}
};

std::vector<std::string> observable_names(const RunConfig& cfg) {
  std::vector<std::string> names;
  for (const auto& o : cfg.observables) names.push_back(o.name);
  return names;
}

void run_check(const RunConfig& cfg, const fs::path& out) {
  const auto t0 = clock_t_::now();
  const ConditionReport rep = check_conditions(cfg.potential, cfg.beta,
                                               cfg.basis.domain_halfwidth);
  njson j;
  j["c1"] = {{"ok", rep.c1_ok}, {"grad_norm", jnum(rep.c1_grad_norm)}};
  j["c2"] = {{"ok", rep.c2_ok},
             {"monotone_radius", jnum(rep.c2_monotone_radius)},
             {"w_boundary", jnum(rep.c2_w_boundary)}};
  j["c3"] = {{"ok", rep.c3_ok},
             {"sup_ratio", jnum(rep.c3_sup_ratio)},
             {"witness_q", jnum(rep.c3_witness_q)},
             {"tail_rising", rep.c3_tail_rising}};
  j["grid_halfwidth"] = jnum(rep.grid_halfwidth);
  j["all_ok"] = rep.all_ok();
  j["summary"] = rep.summary();
  j["elapsed_seconds"] = seconds_since(t0);
  write_json(out / "conditions.json", j);
}

void write_spectrum_csv(const fs::path& path, const SpectrumReport& rep) {
  CsvBuilder csv({"index", "re", "im", "in_kernel", "gap"});
  const double gap = rep.gap_defined ? rep.gap
                                     : std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i) {
    const auto ev = rep.eigenvalues(i);
    const double in_kernel = std::abs(ev) <= rep.kernel_tol ? 1.0 : 0.0;
    csv.row({static_cast<double>(i), ev.real(), ev.imag(), in_kernel, gap});
  }
  write_text(path, csv.str());
}

void run_spectrum(const RunConfig& cfg, const fs::path& out) {
  Workspace ws(cfg);
  const double tol = cfg.tolerances.kernel_tol;
  write_spectrum_csv(out / "spectrum_K.csv", compute_spectrum(ws.ops.K, tol));
  const auto mori = build_mori(ws.ops, ws.basis, cfg.observables);
  write_spectrum_csv(out / "spectrum_QKQ.csv",
                     compute_spectrum(build_qkq(ws.ops, mori), tol));
}

void run_kernel(const RunConfig& cfg, const fs::path& out) {
  const auto t0 = clock_t_::now();
  Workspace ws(cfg);
  const auto mori = build_mori(ws.ops, ws.basis, cfg.observables);
  const Eigen::MatrixXd qkq = build_qkq(ws.ops, mori);
  const int m = static_cast<int>(cfg.observables.size());
  const double tail = cfg.tolerances.fit_tail_fraction;

  const KernelSeries ks =
      memory_kernel_series(mori, ws.ops, qkq, cfg.time.t_max, cfg.time.dt_out, tail);
  const ForceSeries force =
      fluctuation_force_series(mori, ws.ops, qkq, cfg.time.t_max, cfg.time.dt_out, tail);
  const AcfSeries acf = acf_series(mori, ws.ops, cfg.time.t_max, cfg.time.dt_out, tail);

  std::vector<std::string> kh{"t"};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      kh.push_back("K_" + std::to_string(i) + "_" + std::to_string(j));
  CsvBuilder kcsv(kh);
  double max_abs = 0.0;
  for (Eigen::Index k = 0; k < ks.t.size(); ++k) {
    std::vector<double> row{ks.t(k)};
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        row.push_back(ks.values[k](i, j));
        max_abs = std::max(max_abs, std::abs(ks.values[k](i, j)));
      }
    kcsv.row(row);
  }
  write_text(out / "kernel_galerkin.csv", kcsv.str());

  std::vector<std::string> fh{"t"};
  for (int i = 0; i < m; ++i) fh.push_back("force_norm_" + std::to_string(i));
  for (int i = 0; i < m; ++i) fh.push_back("force_acf_" + std::to_string(i));
  CsvBuilder fcsv(fh);
  for (Eigen::Index k = 0; k < force.t.size(); ++k) {
    std::vector<double> row{force.t(k)};
    for (int i = 0; i < m; ++i) row.push_back(force.force_norm(k, i));
    for (int i = 0; i < m; ++i) row.push_back(force.force_acf(k, i));
    fcsv.row(row);
  }
  write_text(out / "force_galerkin.csv", fcsv.str());

  std::vector<std::string> ah{"t"};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      ah.push_back("C_" + std::to_string(i) + "_" + std::to_string(j));
  CsvBuilder acsv(ah);
  for (Eigen::Index k = 0; k < acf.t.size(); ++k) {
    std::vector<double> row{acf.t(k)};
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) row.push_back(acf.values[k](i, j));
    acsv.row(row);
  }
  write_text(out / "acf_galerkin.csv", acsv.str());

  njson j;
  j["observables"] = observable_names(cfg);
  j["t_max"] = cfg.time.t_max;
  j["dt_out"] = cfg.time.dt_out;
  j["max_abs"] = jnum(max_abs);
  j["equilibrium"] = matrix_json(ks.equilibrium);
  j["equilibrium_limit"] = matrix_json(ks.equilibrium_limit);
  j["fdt_difference_max"] =
      jnum(ks.fdt_difference.size() > 0 ? ks.fdt_difference.maxCoeff() : 0.0);
  njson fits = njson::array();
  for (int i = 0; i < m; ++i) {
    njson row = njson::array();
    for (int j2 = 0; j2 < m; ++j2) row.push_back(fit_json(ks.fits[i][j2]));
    fits.push_back(row);
  }
  j["kernel_fits"] = fits;
  njson ffits = njson::array();
  for (int i = 0; i < m; ++i) ffits.push_back(fit_json(force.acf_fits[i]));
  j["force_acf_fits"] = ffits;
  njson afits = njson::array();
  for (int i = 0; i < m; ++i) {
    njson row = njson::array();
    for (int j2 = 0; j2 < m; ++j2) row.push_back(fit_json(acf.envelope_fits[i][j2]));
    afits.push_back(row);
  }
  j["acf_envelope_fits"] = afits;
  j["elapsed_seconds"] = seconds_since(t0);
  write_json(out / "kernel_galerkin.json", j);
}

SimConfig sim_config(const RunConfig& cfg) {
  SimConfig sim;
  sim.potential = cfg.potential;
  sim.beta = cfg.beta;
  sim.gamma = cfg.gamma;
  sim.dt = cfg.ensemble.dt;
  sim.n_steps = cfg.ensemble.n_steps;
  sim.n_replicas = cfg.ensemble.n_replicas;
  sim.seed = cfg.ensemble.seed;
  sim.scheme = cfg.ensemble.scheme;
  return sim;
}

void run_simulate(const RunConfig& cfg, const fs::path& out, int n_threads) {
  const auto t0 = clock_t_::now();
  const TrajectoryStore store = integrate(sim_config(cfg), n_threads);
  store.save((out / "trajectory.bin").string());
  njson j;
  j["dt"] = cfg.ensemble.dt;
  j["n_steps"] = cfg.ensemble.n_steps;
  j["n_replicas"] = cfg.ensemble.n_replicas;
  j["seed"] = cfg.ensemble.seed;
  j["scheme"] = to_string(cfg.ensemble.scheme);
  j["init"] = "equilibrium";
  j["elapsed_seconds"] = seconds_since(t0);
  write_json(out / "simulate.json", j);
}

void run_extract(const RunConfig& cfg, const fs::path& out, int n_threads) {
  if (!fs::exists(out / "trajectory.bin")) run_simulate(cfg, out, n_threads);
  const auto t0 = clock_t_::now();
  const TrajectoryStore store = TrajectoryStore::load((out / "trajectory.bin").string());

  const double ratio = cfg.time.dt_out / store.dt();
  const auto stride = static_cast<std::int64_t>(std::llround(ratio));
  if (stride < 1 || std::abs(stride * store.dt() - cfg.time.dt_out) > 1e-9 * cfg.time.dt_out)
    throw ConfigError(
        "extract: \"dt_out\" must be a positive integer multiple of the ensemble \"dt\"");
  const auto n_out = static_cast<std::int64_t>(std::floor(cfg.time.t_max / cfg.time.dt_out + 1e-9));
  const std::int64_t max_lag = n_out * stride;

  const AcfEstimate acf =
      ensemble_acf(store, cfg.observables, max_lag, static_cast<int>(stride));
  const int m = static_cast<int>(cfg.observables.size());

  std::vector<std::string> ah{"t"};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      ah.push_back("C_" + std::to_string(i) + "_" + std::to_string(j));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      ah.push_back("se_" + std::to_string(i) + "_" + std::to_string(j));
  CsvBuilder acsv(ah);
  for (Eigen::Index k = 0; k < acf.t.size(); ++k) {
    std::vector<double> row{acf.t(k)};
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) row.push_back(acf.values[k](i, j));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) row.push_back(acf.se[k](i, j));
    acsv.row(row);
  }
  write_text(out / "acf_trajectory.csv", acsv.str());

  Workspace ws(cfg);
  const auto mori = build_mori(ws.ops, ws.basis, cfg.observables);
  const KernelSeries ks = volterra_extract(acf, mori.Omega, cfg.time.dt_out);

  std::vector<std::string> kh{"t"};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      kh.push_back("K_" + std::to_string(i) + "_" + std::to_string(j));
  CsvBuilder kcsv(kh);
  for (Eigen::Index k = 0; k < ks.t.size(); ++k) {
    std::vector<double> row{ks.t(k)};
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) row.push_back(ks.values[k](i, j));
    kcsv.row(row);
  }
  write_text(out / "kernel_volterra.csv", kcsv.str());

  njson j;
  j["observables"] = observable_names(cfg);
  j["dt_out"] = cfg.time.dt_out;
  j["stride"] = stride;
  j["max_lag_steps"] = max_lag;
  j["n_replicas"] = acf.n_replicas;
  j["volterra_residual"] = jnum(ks.volterra_residual);
  j["residual_warning"] = ks.residual_warning;
  j["elapsed_seconds"] = seconds_since(t0);
  write_json(out / "kernel_volterra.json", j);
}

njson certificate_json(const HypoCertificate& cert) {
  njson j;
  j["target"] = to_string(cert.target);
  j["success"] = cert.success;
  j["kappa"] = jnum(cert.kappa);
  j["delta"] = jnum(cert.delta);
  j["epsilon"] = jnum(cert.epsilon);
  j["lambda_cert"] = jnum(cert.lambda_cert);
  j["c_cert"] = jnum(cert.c_cert);
  j["comparison_gap"] = jnum(cert.comparison_gap);
  j["message"] = cert.message;
  const HypoConstants& k = cert.constants;
  j["constants"] = {{"lambda_m", jnum(k.lambda_m)},
                    {"lambda_M", jnum(k.lambda_M)},
                    {"c1", jnum(k.c1)},
                    {"c2", jnum(k.c2)},
                    {"c3", jnum(k.c3)},
                    {"c4", jnum(k.c4)},
                    {"chain_excess", jnum(k.chain_excess)},
                    {"chain_bound_holds", k.chain_bound_holds}};
  return j;
}

void run_certify(const RunConfig& cfg, const fs::path& out) {
  const auto t0 = clock_t_::now();
  Workspace ws(cfg);
  const Eigen::MatrixXd a = build_aux_a(ws.ops);
  const auto mori = build_mori(ws.ops, ws.basis, cfg.observables);
  const HypoConstants constants = estimate_constants(ws.ops, a, &mori);

  const double tol = cfg.tolerances.kernel_tol;
  const double gap_k = compute_spectrum(ws.ops.K, tol).gap;
  HypoCertificate ck = certify(constants, CertTarget::K, 200, 200, gap_k);
  njson jk = certificate_json(ck);
  jk["elapsed_seconds"] = seconds_since(t0);
  write_json(out / "certificate_K.json", jk);

  const double gap_q = compute_spectrum(build_qkq(ws.ops, mori), tol).gap;
  HypoCertificate cq = certify(constants, CertTarget::QKQ, 200, 200, gap_q);
  njson jq = certificate_json(cq);
  jq["elapsed_seconds"] = seconds_since(t0);
  write_json(out / "certificate_QKQ.json", jq);
}

int header_column(const Csv& csv, const std::string& name, const fs::path& path) {
  for (std::size_t i = 0; i < csv.header.size(); ++i)
    if (csv.header[i] == name) return static_cast<int>(i);
  throw IoError("pipeline: column \"" + name + "\" missing from " + path.string());
}

njson spectrum_summary(const fs::path& path) {
  const Csv csv = read_csv(path);
  const int gap_col = header_column(csv, "gap", path);
  const int kernel_col = header_column(csv, "in_kernel", path);
  int kernel_dim = 0;
  for (const auto& row : csv.rows) kernel_dim += row[kernel_col] > 0.5 ? 1 : 0;
  njson j;
  j["source"] = path.filename().string();
  j["n_eigenvalues"] = csv.rows.size();
  j["kernel_dim"] = kernel_dim;
  j["gap"] = csv.rows.empty() ? njson() : jnum(csv.rows.front()[gap_col]);
  return j;
}

njson volterra_cross_validation(const fs::path& out) {
  if (!fs::exists(out / "kernel_volterra.csv") || !fs::exists(out / "kernel_volterra.json"))
    return njson{{"status", "not_run"}};
  const Csv kv = read_csv(out / "kernel_volterra.csv");
  const Csv kg = read_csv(out / "kernel_galerkin.csv");
  njson j = read_json(out / "kernel_volterra.json");
  j["status"] = "ok";
  if (kv.header.size() != kg.header.size()) {
    j["rel_l2_vs_galerkin"] = "incomparable: different observable sets";
    return j;
  }
  double num = 0.0, den = 0.0;
  std::size_t n = 0;
  for (; n < kv.rows.size() && n < kg.rows.size(); ++n) {
    if (std::abs(kv.rows[n][0] - kg.rows[n][0]) > 1e-9) break;
    for (std::size_t c = 1; c < kv.header.size(); ++c) {
      const double d = kv.rows[n][c] - kg.rows[n][c];
      num += d * d;
      den += kg.rows[n][c] * kg.rows[n][c];
    }
  }
  j["points_compared"] = n;
  j["rel_l2_vs_galerkin"] =
      den > 0.0 ? jnum(std::sqrt(num / den)) : njson("undefined: zero reference kernel");
  return j;
}

void run_report(const RunConfig& cfg, const fs::path& out) {
  if (!fs::exists(out / "spectrum_K.csv"))
    throw ConfigError("missing dependency: spectrum");
  if (!fs::exists(out / "kernel_galerkin.json"))
    throw ConfigError("missing dependency: kernel");
  if (!fs::exists(out / "certificate_K.json"))
    throw ConfigError("missing dependency: certify");

  const auto t0 = clock_t_::now();
  njson j;

  const ConditionReport cond =
      check_conditions(cfg.potential, cfg.beta, cfg.basis.domain_halfwidth);
  j["conditions"] = {{"c1_ok", cond.c1_ok},
                     {"c2_ok", cond.c2_ok},
                     {"c3_ok", cond.c3_ok},
                     {"all_ok", cond.all_ok()},
                     {"c3_sup_ratio", jnum(cond.c3_sup_ratio)},
                     {"summary", cond.summary()}};

  j["spectrum"] = njson::object();
  j["spectrum"]["K"] = spectrum_summary(out / "spectrum_K.csv");
  if (fs::exists(out / "spectrum_QKQ.csv"))
    j["spectrum"]["QKQ"] = spectrum_summary(out / "spectrum_QKQ.csv");

  j["kernel"] = read_json(out / "kernel_galerkin.json");
  j["volterra"] = volterra_cross_validation(out);

  j["certificates"] = njson::object();
  j["certificates"]["K"] = read_json(out / "certificate_K.json");
  if (fs::exists(out / "certificate_QKQ.json"))
    j["certificates"]["QKQ"] = read_json(out / "certificate_QKQ.json");
  if (j["spectrum"].contains("QKQ") && j["spectrum"]["K"].contains("gap")) {
    // measured-gap comparison of the two flows; recorded, never asserted
    j["gap_comparison"] = {{"gap_K", j["spectrum"]["K"]["gap"]},
                           {"gap_QKQ", j["spectrum"]["QKQ"]["gap"]}};
  }

  Workspace ws(cfg);
  const auto mori = build_mori(ws.ops, ws.basis, cfg.observables);
  const Eigen::MatrixXd qkq = build_qkq(ws.ops, mori);
  const double tol = cfg.tolerances.kernel_tol;

  const double h1 = (ws.ops.Pi * ws.ops.L * ws.ops.Pi).cwiseAbs().maxCoeff();
  const double aux_norm = operator_norm_estimate(build_aux_a(ws.ops));
  j["structure_checks"] = {
      {"h1_residual", {{"value", jnum(h1)}, {"tolerance", 1e-10}, {"ok", h1 <= 1e-10}}},
      {"skew_residual", {{"value", jnum(ws.ops.skew_residual)}}},
      {"aux_operator_norm",
       {{"value", jnum(aux_norm)}, {"tolerance", 0.5 + 1e-12}, {"ok", aux_norm <= 0.5 + 1e-12}}}};

  const KernelProjections proj = kernel_projections(ws.ops.K, qkq, mori, tol);
  const KernelClassification cls = classify_kernel(qkq, ws.ops.K, mori, tol);
  const bool asserted = cls.w_type == 0;
  j["projection_discrepancy"] = {
      {"value", jnum(proj.discrepancy)},
      {"tolerance", 1e-8},
      {"asserted", asserted},
      {"ok", !asserted || proj.discrepancy <= 1e-8},
      {"kernel_dim_qkq", proj.kernel_dim_qkq},
      {"pairing_condition", jnum(proj.pairing_condition)}};
  j["kernel_classification"] = {{"kernel_dim", cls.kernel_dim},
                                {"ker_k", cls.ker_k},
                                {"ran_p", cls.ran_p},
                                {"w_type", cls.w_type},
                                {"unclassified", cls.unclassified}};

  njson timings;
  for (const char* stage : {"conditions.json", "kernel_galerkin.json",
                            "kernel_volterra.json", "simulate.json",
                            "certificate_K.json"}) {
    if (!fs::exists(out / stage)) continue;
    const njson meta = read_json(out / stage);
    if (meta.contains("elapsed_seconds")) timings[stage] = meta["elapsed_seconds"];
  }
  timings["report.json"] = seconds_since(t0);
  j["timings_seconds"] = timings;

  write_json(out / "report.json", j);
}

}  // namespace

const std::vector<std::string>& pipeline_subcommands() {
  static const std::vector<std::string> names{
      "check", "spectrum", "kernel", "extract", "certify", "simulate", "report"};
  return names;
}

void run_pipeline(const std::string& subcommand, const RunConfig& cfg, int n_threads) {
  if (n_threads < 1) throw ConfigError("pipeline: thread count must be at least 1");
  const fs::path out(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("pipeline: cannot create output directory \"" + out.string() + "\"");
  write_text(out / "resolved_config.json", emit_config(cfg));

  if (subcommand == "check") return run_check(cfg, out);
  if (subcommand == "spectrum") return run_spectrum(cfg, out);
  if (subcommand == "kernel") return run_kernel(cfg, out);
  if (subcommand == "extract") return run_extract(cfg, out, n_threads);
  if (subcommand == "certify") return run_certify(cfg, out);
  if (subcommand == "simulate") return run_simulate(cfg, out, n_threads);
  if (subcommand == "report") return run_report(cfg, out);

  std::string names;
  for (const auto& n : pipeline_subcommands()) names += (names.empty() ? "" : ", ") + n;
  throw ConfigError("pipeline: unknown subcommand \"" + subcommand + "\" (expected one of " +
                    names + ")");
}

}  // namespace emz
