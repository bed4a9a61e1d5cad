// Command-line front end: scenario runs, presets, capacity curves, deviation sweeps.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "relshift/relshift.hpp"

namespace {

using namespace relshift;
using namespace relshift::scenarios;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

ScenarioConfig load_scenario(const std::string& source) {
  if (std::filesystem::is_regular_file(source)) {
    std::ifstream f(source, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
  }
  return preset(source);
}

Engine parse_engine(const std::string& s) {
  if (s == "analytic") return Engine::Analytic;
  if (s == "gr") return Engine::Gr;
  if (s == "both") return Engine::Both;
  throw ConfigError("engine", 0, "expected 'analytic', 'gr' or 'both'");
}

int write_rows(const std::vector<ResultRow>& rows, const std::string& out, const std::string& plot) {
  if (out.empty() || out == "-") write_csv(rows, std::cout);
  else emit_csv(rows, out);
  if (!plot.empty()) emit_plotdata(rows, plot);
  std::size_t failed = 0;
  for (const auto& r : rows)
    if (!r.error.empty()) ++failed;
  if (failed) {
    std::cerr << failed << " of " << rows.size() << " epochs failed\n";
    return kExitNumeric;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relativistic frequency shifts and key capacity for satellite links"};
  app.require_subcommand(1);
  std::size_t workers = default_workers();
  app.add_option("-j,--workers", workers, "worker threads (default: RELSHIFT_WORKERS or hardware threads)")
      ->check(CLI::PositiveNumber);

  std::string source, engine, mode, out, plot;
  double step = 0.0;
  auto* run = app.add_subcommand("run", "run a scenario from a config file or preset name");
  run->add_option("scenario", source, "config file path or preset name")->required();
  run->add_option("--engine", engine, "analytic | gr | both");
  run->add_option("--mode", mode, "corrected | uncorrected");
  run->add_option("--step", step, "epoch step in seconds")->check(CLI::PositiveNumber);
  run->add_option("-o,--out", out, "CSV output path (default: stdout)");
  run->add_option("--plot", plot, "plot-data output path");

  auto* presets = app.add_subcommand("preset", "list or show presets");
  presets->require_subcommand(1);
  auto* preset_list = presets->add_subcommand("list", "list preset names");
  std::string preset_name;
  auto* preset_show = presets->add_subcommand("show", "print a preset as a config document");
  preset_show->add_option("name", preset_name)->required();

  double ratio = 1e10, zmax = 0.0, eta0 = 0.4;
  std::size_t points = 201;
  auto* plob = app.add_subcommand("plob", "capacity bound against redshift");
  plob->add_option("--ratio", ratio, "carrier to bandwidth ratio")->check(CLI::PositiveNumber);
  plob->add_option("--zmax", zmax, "largest |z| (default 4/ratio)");
  plob->add_option("--eta0", eta0, "baseline transmissivity");
  plob->add_option("--points", points, "samples from -zmax to zmax")->check(CLI::Range(2, 1000000));

  std::string dev_preset, dev_out;
  double dev_step = 600.0;
  bool refine = false, cold = false;
  auto* deviation = app.add_subcommand("deviation", "GR against analytic redshift for a preset");
  deviation->add_option("preset", dev_preset)->required();
  deviation->add_option("--step", dev_step, "epoch step in seconds")->check(CLI::PositiveNumber);
  deviation->add_option("--stop", zmax, "span end in seconds (default: preset span)");
  deviation->add_flag("--refine-transits", refine, "add epochs near the centre transit of occluded gaps");
  deviation->add_flag("--cold", cold, "disable warm starts");
  deviation->add_option("-o,--out", dev_out, "CSV output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      ScenarioConfig cfg = load_scenario(source);
      if (!engine.empty()) cfg.engine = parse_engine(engine);
      if (mode == "corrected") cfg.correction = CorrectionMode::Corrected;
      else if (mode == "uncorrected") cfg.correction = CorrectionMode::Uncorrected;
      else if (!mode.empty()) throw ConfigError("correction_mode", 0, "expected 'corrected' or 'uncorrected'");
      if (step > 0.0) cfg.time.step = step;
      return write_rows(run_scenario(cfg, workers), out, plot);
    }
    if (*preset_list) {
      for (const auto& n : preset_names()) std::cout << n << "\t" << preset_description(n) << "\n";
      return 0;
    }
    if (*preset_show) {
      std::cout << serialize_config(preset(preset_name));
      return 0;
    }
    if (*plob) {
      const SignalSpec spec = SignalSpec::from_ratio(ratio, eta0);
      const double zm = zmax > 0.0 ? zmax : 4.0 / ratio;
      std::printf("# z R*z gamma eta plob_bits\n");
      for (std::size_t i = 0; i < points; ++i) {
        const double z = -zm + 2.0 * zm * static_cast<double>(i) / static_cast<double>(points - 1);
        const CapacitySample s = capacity_at(0.0, z, true, spec);
        std::printf("%.16e %.16e %.16e %.16e %.16e\n", z, ratio * z, *s.gamma, *s.eta, *s.plob_bits);
      }
      return 0;
    }
    if (*deviation) {
      ScenarioConfig cfg = preset(dev_preset);
      cfg.engine = Engine::Both;
      cfg.time.step = dev_step;
      if (zmax > 0.0) cfg.time.stop = zmax;
      cfg.de.refine_transits = refine;
      cfg.de.warm_start = !cold;
      return write_rows(run_scenario(cfg, workers), dev_out, "");
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DomainError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
