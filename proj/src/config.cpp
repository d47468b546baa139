#include "emz/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "emz/errors.hpp"
#include "emz/gibbs.hpp"
#include "json.hpp"

namespace emz {

namespace {

using njson = nlohmann::ordered_json;

void reject_unknown(const njson& obj, const std::string& where,
                    std::initializer_list<std::string_view> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (auto a : allowed)
      if (it.key() == a) { known = true; break; }
    if (!known)
      throw ConfigError("config: unknown key \"" + it.key() + "\" in " + where);
  }
}

const njson* find(const njson& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

njson require_object(const njson& obj, const std::string& where, const char* key) {
  const njson* v = find(obj, key);
  if (v == nullptr) return njson::object();
  if (!v->is_object())
    throw ConfigError("config: key \"" + std::string(key) + "\" in " + where +
                      " expects an object");
  return *v;
}

double get_number(const njson& obj, const std::string& where, const char* key,
                  double fallback) {
  const njson* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_number())
    throw ConfigError("config: key \"" + std::string(key) + "\" in " + where +
                      " expects a number");
  return v->get<double>();
}

std::int64_t get_integer(const njson& obj, const std::string& where, const char* key,
                         std::int64_t fallback) {
  const njson* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_number_integer())
    throw ConfigError("config: key \"" + std::string(key) + "\" in " + where +
                      " expects an integer");
  return v->get<std::int64_t>();
}

std::uint64_t get_unsigned(const njson& obj, const std::string& where, const char* key,
                           std::uint64_t fallback) {
  const njson* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!(v->is_number_unsigned() || (v->is_number_integer() && v->get<std::int64_t>() >= 0)))
    throw ConfigError("config: key \"" + std::string(key) + "\" in " + where +
                      " expects a nonnegative integer");
  return v->get<std::uint64_t>();
}

std::string get_string(const njson& obj, const std::string& where, const char* key,
                       const std::string& fallback) {
  const njson* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_string())
    throw ConfigError("config: key \"" + std::string(key) + "\" in " + where +
                      " expects a string");
  return v->get<std::string>();
}

Potential parse_potential(const njson& top) {
  const njson* v = find(top, "potential");
  if (v == nullptr) return Potential::harmonic(1.0);
  if (!v->is_object())
    throw ConfigError("config: key \"potential\" in top level expects an object");
  const njson& pj = *v;
  const std::string kind = get_string(pj, "potential", "kind", "");
  if (kind.empty())
    throw ConfigError("config: key \"kind\" in potential expects a string naming the shape");
  if (kind == "harmonic") {
    reject_unknown(pj, "potential", {"kind", "omega2"});
    return Potential::harmonic(get_number(pj, "potential", "omega2", 1.0));
  }
  if (kind == "quartic") {
    reject_unknown(pj, "potential", {"kind", "a"});
    return Potential::quartic(get_number(pj, "potential", "a", 1.0));
  }
  if (kind == "double_well") {
    reject_unknown(pj, "potential", {"kind", "a", "b"});
    return Potential::double_well(get_number(pj, "potential", "a", 1.0),
                                  get_number(pj, "potential", "b", 1.0));
  }
  if (kind == "polynomial") {
    reject_unknown(pj, "potential", {"kind", "coefficients"});
    const njson* cj = find(pj, "coefficients");
    if (cj == nullptr || !cj->is_array() || cj->empty())
      throw ConfigError(
          "config: key \"coefficients\" in potential expects a nonempty array of numbers");
    std::vector<double> c;
    for (const auto& e : *cj) {
      if (!e.is_number())
        throw ConfigError("config: key \"coefficients\" in potential expects numbers only");
      c.push_back(e.get<double>());
    }
    return Potential::polynomial(std::move(c));
  }
  throw ConfigError("config: potential kind \"" + kind +
                    "\" is not one of harmonic, quartic, double_well, polynomial");
}

std::vector<Observable> parse_observables(const njson& top) {
  const njson* v = find(top, "observables");
  if (v == nullptr) return {Observable::momentum()};
  if (!v->is_array())
    throw ConfigError("config: key \"observables\" in top level expects an array");
  std::vector<Observable> out;
  for (const auto& e : *v) {
    if (e.is_string()) {
      const auto s = e.get<std::string>();
      if (s == "p") out.push_back(Observable::momentum());
      else if (s == "q") out.push_back(Observable::position());
      else
        throw ConfigError("config: observable \"" + s +
                          "\" is not one of \"p\", \"q\" (use a term table otherwise)");
      continue;
    }
    if (!e.is_object())
      throw ConfigError("config: each observable expects \"p\", \"q\", or a term table");
    reject_unknown(e, "observable", {"name", "terms"});
    Observable o;
    o.name = get_string(e, "observable", "name", "");
    if (o.name.empty())
      throw ConfigError("config: key \"name\" in observable expects a nonempty string");
    const njson* tj = find(e, "terms");
    if (tj == nullptr || !tj->is_array() || tj->empty())
      throw ConfigError("config: key \"terms\" in observable expects a nonempty array");
    for (const auto& t : *tj) {
      if (!t.is_object())
        throw ConfigError("config: each entry of \"terms\" expects an object");
      reject_unknown(t, "observable term", {"coef", "qpow", "ppow"});
      Observable::Term term;
      term.coef = get_number(t, "observable term", "coef", 1.0);
      term.qpow = static_cast<int>(get_integer(t, "observable term", "qpow", 0));
      term.ppow = static_cast<int>(get_integer(t, "observable term", "ppow", 0));
      if (term.qpow < 0 || term.ppow < 0)
        throw ConfigError("config: observable term powers must be nonnegative");
      o.terms.push_back(term);
    }
    out.push_back(std::move(o));
  }
  if (out.empty()) throw ConfigError("config: \"observables\" must not be an empty array");
  return out;
}

RunConfig parse_json(const njson& top) {
  if (!top.is_object()) throw ConfigError("config: top level expects an object");
  reject_unknown(top, "top level",
                 {"potential", "beta", "gamma", "basis", "observables", "time",
                  "ensemble", "tolerances", "output_dir"});

  RunConfig cfg;
  cfg.potential = parse_potential(top);
  cfg.beta = get_number(top, "top level", "beta", 1.0);
  cfg.gamma = get_number(top, "top level", "gamma", 1.0);

  const njson bj = require_object(top, "top level", "basis");
  reject_unknown(bj, "basis", {"n_q", "n_p", "domain_halfwidth", "quad_nodes"});
  cfg.basis.n_q = static_cast<int>(get_integer(bj, "basis", "n_q", 20));
  cfg.basis.n_p = static_cast<int>(get_integer(bj, "basis", "n_p", 20));
  cfg.basis.domain_halfwidth = get_number(bj, "basis", "domain_halfwidth", 0.0);
  cfg.basis.quad_nodes = static_cast<int>(get_integer(bj, "basis", "quad_nodes", 0));

  cfg.observables = parse_observables(top);

  const njson tj = require_object(top, "top level", "time");
  reject_unknown(tj, "time", {"t_max", "dt_out"});
  cfg.time.t_max = get_number(tj, "time", "t_max", 10.0);
  cfg.time.dt_out = get_number(tj, "time", "dt_out", 0.01);

  const njson ej = require_object(top, "top level", "ensemble");
  reject_unknown(ej, "ensemble", {"dt", "n_steps", "n_replicas", "seed", "scheme"});
  cfg.ensemble.dt = get_number(ej, "ensemble", "dt", 1e-3);
  cfg.ensemble.n_steps = get_integer(ej, "ensemble", "n_steps", 100000);
  cfg.ensemble.n_replicas = static_cast<int>(get_integer(ej, "ensemble", "n_replicas", 4));
  cfg.ensemble.seed = get_unsigned(ej, "ensemble", "seed", 0);
  cfg.ensemble.scheme = scheme_from_string(get_string(ej, "ensemble", "scheme", "baoab"));

  const njson oj = require_object(top, "top level", "tolerances");
  reject_unknown(oj, "tolerances", {"kernel_tol", "fit_tail_fraction"});
  cfg.tolerances.kernel_tol = get_number(oj, "tolerances", "kernel_tol", 1e-8);
  cfg.tolerances.fit_tail_fraction = get_number(oj, "tolerances", "fit_tail_fraction", 0.5);

  cfg.output_dir = get_string(top, "top level", "output_dir", "out");

  if (!(cfg.beta > 0.0)) throw ConfigError("config: \"beta\" must be positive");
  if (cfg.gamma < 0.0) throw ConfigError("config: \"gamma\" must be nonnegative");
  if (cfg.basis.n_q < 1 || cfg.basis.n_p < 1)
    throw ConfigError("config: basis sizes \"n_q\" and \"n_p\" must be at least 1");
  if (cfg.basis.domain_halfwidth < 0.0)
    throw ConfigError("config: \"domain_halfwidth\" must be nonnegative (0 = automatic)");
  if (cfg.basis.quad_nodes < 0)
    throw ConfigError("config: \"quad_nodes\" must be nonnegative (0 = automatic)");
  if (!(cfg.time.t_max > 0.0)) throw ConfigError("config: \"t_max\" must be positive");
  if (!(cfg.time.dt_out > 0.0)) throw ConfigError("config: \"dt_out\" must be positive");
  if (!(cfg.ensemble.dt > 0.0)) throw ConfigError("config: ensemble \"dt\" must be positive");
  if (cfg.ensemble.n_steps < 1)
    throw ConfigError("config: ensemble \"n_steps\" must be at least 1");
  if (cfg.ensemble.n_replicas < 1)
    throw ConfigError("config: ensemble \"n_replicas\" must be at least 1");
  if (!(cfg.tolerances.kernel_tol > 0.0))
    throw ConfigError("config: \"kernel_tol\" must be positive");
  if (!(cfg.tolerances.fit_tail_fraction > 0.0) || cfg.tolerances.fit_tail_fraction > 1.0)
    throw ConfigError("config: \"fit_tail_fraction\" must lie in (0, 1]");
  if (cfg.output_dir.empty())
    throw ConfigError("config: \"output_dir\" must not be empty");

  if (cfg.basis.domain_halfwidth == 0.0)
    cfg.basis.domain_halfwidth =
        suggested_halfwidth(cfg.potential, cfg.beta, cfg.basis.n_q);
  if (cfg.basis.quad_nodes == 0)
    cfg.basis.quad_nodes = suggested_quad_nodes(cfg.basis.n_q);
  return cfg;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  njson top;
  try {
    top = njson::parse(text);
  } catch (const njson::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_json(top);
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("config: cannot read \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string emit_config(const RunConfig& cfg) {
  njson j;
  njson pj;
  const auto& raw = cfg.potential.raw_parameters();
  switch (cfg.potential.kind()) {
    case PotentialKind::Harmonic:
      pj = {{"kind", "harmonic"}, {"omega2", raw[0]}};
      break;
    case PotentialKind::Quartic:
      pj = {{"kind", "quartic"}, {"a", raw[0]}};
      break;
    case PotentialKind::DoubleWell:
      pj = {{"kind", "double_well"}, {"a", raw[0]}, {"b", raw[1]}};
      break;
    case PotentialKind::Polynomial:
      pj = {{"kind", "polynomial"}, {"coefficients", raw}};
      break;
  }
  j["potential"] = pj;
  j["beta"] = cfg.beta;
  j["gamma"] = cfg.gamma;
  j["basis"] = {{"n_q", cfg.basis.n_q},
                {"n_p", cfg.basis.n_p},
                {"domain_halfwidth", cfg.basis.domain_halfwidth},
                {"quad_nodes", cfg.basis.quad_nodes}};
  njson obs = njson::array();
  for (const auto& o : cfg.observables) {
    njson terms = njson::array();
    for (const auto& t : o.terms)
      terms.push_back({{"coef", t.coef}, {"qpow", t.qpow}, {"ppow", t.ppow}});
    obs.push_back({{"name", o.name}, {"terms", terms}});
  }
  j["observables"] = obs;
  j["time"] = {{"t_max", cfg.time.t_max}, {"dt_out", cfg.time.dt_out}};
  j["ensemble"] = {{"dt", cfg.ensemble.dt},
                   {"n_steps", cfg.ensemble.n_steps},
                   {"n_replicas", cfg.ensemble.n_replicas},
                   {"seed", cfg.ensemble.seed},
                   {"scheme", to_string(cfg.ensemble.scheme)}};
  j["tolerances"] = {{"kernel_tol", cfg.tolerances.kernel_tol},
                     {"fit_tail_fraction", cfg.tolerances.fit_tail_fraction}};
  j["output_dir"] = cfg.output_dir;
  return j.dump(2) + "\n";
}

}  // namespace emz
