#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "emz/config.hpp"
#include "emz/errors.hpp"
#include "emz/pipeline.hpp"
#include "json.hpp"

namespace {

int fail(const std::string& type, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = {{"type", type}, {"message", message}};
  std::cerr << j.dump(2) << "\n";
  return 1;
}

int resolve_threads(int cli_threads) {
  if (cli_threads > 0) return cli_threads;
  if (const char* env = std::getenv("EMZ_THREADS")) {
    const int n = std::atoi(env);
    if (n < 1) throw emz::ConfigError("EMZ_THREADS must be a positive integer");
    return n;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"emz: Galerkin Mori-Zwanzig laboratory for Langevin dynamics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 0;
  for (const auto& name : emz::pipeline_subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "run configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--threads", threads, "worker threads for ensemble stages")
        ->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    emz::RunConfig cfg = emz::parse_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    emz::run_pipeline(app.get_subcommands().front()->get_name(), cfg,
                      resolve_threads(threads));
  } catch (const emz::ConfigError& e) {
    return fail("config", e.what());
  } catch (const emz::DomainError& e) {
    return fail("domain", e.what());
  } catch (const emz::NumericsError& e) {
    return fail("numerics", e.what());
  } catch (const emz::IoError& e) {
    return fail("io", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
