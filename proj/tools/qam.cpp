// qam <subcommand> <config.json> [--out-dir DIR] [--threads N]

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qam/cli/commands.hpp"

namespace {

int run_subcommand(qam::cli::Experiment e, const std::string& config_path, const std::string& out_dir,
                   unsigned threads) {
  using namespace qam::cli;
  try {
    const auto doc = read_json_text(read_file(config_path));
    const auto cfg = parse_config(doc, e);
    Context ctx{out_dir, threads == 0 ? 1u : threads, &std::cout};
    const auto files = run(cfg, ctx);
    for (const auto& f : files) std::cout << "wrote " << f << "\n";
    return kOk;
  } catch (const ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return kConfigError;
  } catch (const qam::InvalidArgument& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return kConfigError;
  } catch (const qam::IoError& ex) {
    std::cerr << "i/o error: " << ex.what() << "\n";
    return kIoError;
  } catch (const qam::NumericalError& ex) {
    std::cerr << "numerical failure: " << ex.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& ex) {
    std::cerr << "numerical failure: " << ex.what() << "\n";
    return kNumericalError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum accelerator modes of kicked atoms under gravity"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qam::cli::kCodeVersion));

  std::string config_path, out_dir = ".";
  unsigned threads = qam::default_threads();
  qam::cli::Experiment chosen = qam::cli::Experiment::simulate;

  const std::pair<const char*, const char*> subs[] = {
      {"simulate", "evolve a state or ensemble; momentum histograms and optional Husimi grids"},
      {"scan-tau", "momentum density over a grid of kicking periods"},
      {"portrait", "pseudoclassical phase portrait and periodic orbits"},
      {"bands", "quasi-energy bands and geometric potentials"},
      {"farey", "Omega* values, continued fractions and Farey mediants"},
      {"husimi", "Husimi grids of an evolved state"},
      {"beta-scan", "captured probability against quasi-momentum"}};
  for (const auto& [name, help] : subs) {
    auto* sc = app.add_subcommand(name, help);
    sc->add_option("config", config_path, "JSON run configuration")->required();
    sc->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
    sc->add_option("--threads", threads, "worker threads (default: $QAM_THREADS, else all cores)");
    const std::string n = name;
    sc->callback([&chosen, n] { chosen = qam::cli::parse_experiment(n); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : qam::cli::kConfigError;
  }
  return run_subcommand(chosen, config_path, out_dir, threads);
}
