#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "fixtures.hpp"
#include "medsec/scenario.hpp"

namespace medsec::cli {
namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::size_t> messages;
  std::optional<std::uint64_t> seed;
  std::string format = "md";
};

/// A filesystem path, or the name of a bundled fixture.
ScenarioConfig resolve_config(const Options& opt) {
  ScenarioConfig cfg;
  if (std::filesystem::exists(opt.config)) {
    cfg = load_config(opt.config);
  } else {
    const std::string name = std::filesystem::path(opt.config).stem().string();
    const Fixture* found = nullptr;
    for (const auto& f : bundled_fixtures()) {
      if (f.name == name) found = &f;
    }
    if (!found) throw ConfigError("config", "no such config file or bundled fixture: " + opt.config);
    cfg = parse_config(found->json);
  }
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.messages) cfg.messages = *opt.messages;
  return cfg;
}

std::filesystem::path out_dir(const Options& opt, const ScenarioConfig& cfg) {
  if (!opt.out.empty()) return opt.out;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  return std::filesystem::path("out") / cfg.name;
}

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config, "Config file or bundled fixture name")->required();
  cmd->add_option("--out", opt.out, "Output directory");
  cmd->add_option("--seed", opt.seed, "Override the config seed");
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulated medical-IoT telemetry testbed: ARP-spoofing MITM, AES-128-CBC, benchmarks"};
  app.require_subcommand(1);

  Options run_opt;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its logs");
  add_common(run_cmd, run_opt);
  run_cmd->add_option("--messages", run_opt.messages, "Override the message count");

  Options bench_opt;
  auto* bench_cmd = app.add_subcommand("bench", "Paired plain/encrypted benchmark with report files");
  add_common(bench_cmd, bench_opt);
  bench_cmd->add_option("--messages", bench_opt.messages, "Messages per mode");
  bench_cmd->add_option("--format", bench_opt.format, "Report printed to stdout")->check(CLI::IsMember({"md", "csv"}));

  Options report_opt;
  auto* report_cmd = app.add_subcommand("report", "Re-render a report from a bench output directory");
  add_common(report_cmd, report_opt);
  report_cmd->add_option("--format", report_opt.format, "md or csv")->check(CLI::IsMember({"md", "csv"}));

  std::string fixtures_out;
  auto* fixtures_cmd = app.add_subcommand("fixtures", "List bundled configs");
  fixtures_cmd->add_option("--out", fixtures_out, "Also write them into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) {
      const ScenarioConfig cfg = resolve_config(run_opt);
      const RunSummary summary = run(cfg, out_dir(run_opt, cfg));
      out << summary.to_json();
    } else if (*bench_cmd) {
      ScenarioConfig cfg = resolve_config(bench_opt);
      const auto format = bench::parse_report_format(bench_opt.format);
      const auto report = write_bench(cfg, cfg.messages, out_dir(bench_opt, cfg));
      out << bench::render_report(report, format);
    } else if (*report_cmd) {
      const ScenarioConfig cfg = resolve_config(report_opt);
      const auto format = bench::parse_report_format(report_opt.format);
      out << rerender_report(cfg, out_dir(report_opt, cfg) / "samples.jsonl", format);
    } else if (*fixtures_cmd) {
      for (const auto& f : bundled_fixtures()) {
        out << f.name << '\n';
        if (fixtures_out.empty()) continue;
        std::filesystem::create_directories(fixtures_out);
        std::ofstream file(std::filesystem::path(fixtures_out) / (std::string(f.name) + ".json"), std::ios::binary);
        file << f.json;
      }
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kInvariantViolation;
  }
  return kOk;
}

}  // namespace medsec::cli
