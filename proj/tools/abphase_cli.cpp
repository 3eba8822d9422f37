#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "abphase/cli.hpp"
#include "abphase/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

int default_count(const std::string& suite) {
  if (suite == "stokes") return 50;
  if (suite == "appendixA" || suite == "gauge") return 20;
  return 1;
}

abphase::OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return abphase::OutputFormat::Csv;
  if (s == "json") return abphase::OutputFormat::Json;
  throw abphase::ConfigError("--format", "expected csv or json");
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw abphase::ConfigError("--output", "cannot write '" + path + "'");
  out << text;
  if (!out) throw abphase::ConfigError("--output", "write to '" + path + "' failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aharonov-Bohm phase by potential holonomy and by spacetime flux"};
  app.require_subcommand(1);

  std::string output;
  std::string format;
  bool strict = false;
  bool timing = false;
  app.add_option("--output,-o", output, "Write the report here instead of standard output");
  app.add_option("--format,-f", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--strict", strict, "Treat a nonzero field on a particle path as an error");
  app.add_flag("--timing", timing, "Fill wall_time_ms (otherwise 0, keeping reports reproducible)");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Evaluate a scenario in every configured frame");
  run->add_option("config", config_path, "JSON run configuration")->required();
  run->fallthrough();

  std::string sweep_config;
  std::string param = "v";
  double from = 0.0;
  double to = 0.9;
  int steps = 10;
  auto* sweep = app.add_subcommand("sweep", "Evaluate a scenario over a range of boosts along x");
  sweep->add_option("config", sweep_config, "JSON run configuration")->required();
  sweep->add_option("--param", param, "Swept parameter (only v is supported)");
  sweep->add_option("--from", from, "First v/c");
  sweep->add_option("--to", to, "Last v/c");
  sweep->add_option("--steps", steps, "Number of rows, endpoints included");
  sweep->fallthrough();

  std::string suite;
  std::uint64_t seed = 1;
  std::optional<int> count;
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", suite, "stokes, appendixA, gauge or frames")->required();
  verify->add_option("--seed", seed, "First random seed");
  verify->add_option("--count", count, "Number of random cases");
  verify->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (verify->parsed()) {
      const abphase::SuiteReport rep = abphase::run_suite(suite, seed, count.value_or(default_count(suite)));
      const auto fmt = format.empty() ? abphase::OutputFormat::Csv : parse_format(format);
      emit(fmt == abphase::OutputFormat::Json ? abphase::format_json(rep) : abphase::format_csv(rep), output);
      if (!rep.passed()) {
        std::cerr << "verify " << suite << ": FAILED (max residual " << rep.max_residual() << ")\n";
        return kExitFailure;
      }
      return kExitOk;
    }

    abphase::RunConfig cfg = abphase::load_run_config(run->parsed() ? config_path : sweep_config);
    if (!format.empty()) cfg.format = parse_format(format);
    if (!output.empty()) cfg.output_path = output;
    cfg.strict = cfg.strict || strict;

    abphase::RunReport rep;
    if (run->parsed()) {
      rep = abphase::cmd_run(cfg, timing);
    } else {
      if (param != "v") throw abphase::ConfigError("--param", "only v can be swept");
      rep = abphase::cmd_sweep(cfg, from, to, steps, timing);
    }
    emit(cfg.format == abphase::OutputFormat::Json ? abphase::format_json(rep) : abphase::format_csv(rep),
         cfg.output_path);
    return kExitOk;
  } catch (const abphase::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const abphase::ToleranceNotMet& e) {
    std::cerr << "computation failed: " << e.what() << " (residual " << e.residual() << ", " << e.panels()
              << " panels)\n";
    return kExitFailure;
  } catch (const abphase::Error& e) {
    std::cerr << "computation failed: " << e.what() << "\n";
    return kExitFailure;
  }
}
