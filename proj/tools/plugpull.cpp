// plugpull command-line entry points.
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "plugpull/config.hpp"
#include "plugpull/errors.hpp"
#include "plugpull/metrics.hpp"
#include "plugpull/server.hpp"
#include "plugpull/simulator.hpp"
#include "plugpull/sweep.hpp"
#include "plugpull/telemetry.hpp"

using namespace plugpull;

namespace {

constexpr int kUsage = 2;

struct Usage {
  std::string message;
};

std::optional<std::string> config_path(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("PLUGPULL_CONFIG"); env && *env) return std::string(env);
  return std::nullopt;
}

sim::ScenarioConfig require_config(const std::string& flag) {
  const auto path = config_path(flag);
  if (!path) throw Usage{"missing config: pass --config <path> or set PLUGPULL_CONFIG"};
  return sim::load_config(*path);
}

/// Logs as read back from their CSV text, so metrics match the files.
sim::SimLog through_csv(const sim::SimLog& log, const std::string& path) {
  std::stringstream ss;
  sim::write_csv(ss, log);
  if (!path.empty()) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << ss.str();
    if (!out) throw Error("write failed for '" + path + "'");
  }
  return sim::read_csv(ss);
}

std::string opt_number(const std::optional<double>& x) {
  return x ? sim::format_number(*x) : std::string("-");
}

std::string metrics_header() {
  char line[256];
  std::snprintf(line, sizeof line, "%-9s %12s %12s %12s %12s %12s\n", "mode", "overshoot_m",
                "return_s", "peak_fdot", "t_sep_s", "t_detect_s");
  return line;
}

std::string metrics_row(const char* name, const sim::Metrics& m) {
  char line[256];
  std::snprintf(line, sizeof line, "%-9s %12s %12s %12s %12s %12s\n", name,
                m.separated ? sim::format_number(m.overshoot).c_str() : "-",
                opt_number(m.time_to_return).c_str(), sim::format_number(m.peak_fdot).c_str(),
                m.separated ? sim::format_number(m.t_sep).c_str() : "-",
                opt_number(m.t_detect).c_str());
  return line;
}

std::string metrics_table(const sim::Metrics& base, const sim::Metrics& prop) {
  std::string out = metrics_header() + metrics_row("baseline", base) + metrics_row("proposed", prop);
  if (base.separated && prop.separated && base.overshoot > 0) {
    char line[64];
    std::snprintf(line, sizeof line, "reduction %.1f%%\n",
                  100.0 * (base.overshoot - prop.overshoot) / base.overshoot);
    out += line;
  }
  return out;
}

int cmd_run(const std::string& config, const std::string& mode, const std::optional<std::uint64_t>& seed,
            const std::string& out) {
  auto cfg = require_config(config);
  if (!mode.empty()) cfg.mode = sim::mode_from_string(mode);
  if (seed) cfg.seed = *seed;
  const auto log = sim::run_scenario(cfg);
  if (out.empty() || out == "-") {
    sim::write_csv(std::cout, log);
  } else {
    sim::write_csv_file(out, log);
  }
  return 0;
}

int cmd_compare(const std::string& config, const std::optional<std::uint64_t>& seed,
                const std::string& out, const std::string& csv_dir) {
  auto cfg = require_config(config);
  if (seed) cfg.seed = *seed;
  std::vector<sim::ScenarioConfig> cfgs(2, cfg);
  cfgs[0].mode = sim::Mode::Baseline;
  cfgs[1].mode = sim::Mode::Proposed;
  const auto logs = sim::run_batch(cfgs);
  std::string base_csv, prop_csv;
  if (!csv_dir.empty()) {
    std::filesystem::create_directories(csv_dir);
    base_csv = (std::filesystem::path(csv_dir) / "baseline.csv").string();
    prop_csv = (std::filesystem::path(csv_dir) / "proposed.csv").string();
  }
  const auto base = sim::compute_metrics(through_csv(logs[0], base_csv), cfg.teleop.recovery_duration);
  const auto prop = sim::compute_metrics(through_csv(logs[1], prop_csv), cfg.teleop.recovery_duration);
  const std::string table = metrics_table(base, prop);
  std::cout << table;
  if (!out.empty()) {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error("cannot open '" + out + "' for writing");
    f << table;
  }
  return 0;
}

int cmd_metrics(const std::string& log_path, double window) {
  const auto log = sim::read_csv_file(log_path);
  std::cout << metrics_header() << metrics_row("log", sim::compute_metrics(log, window));
  return 0;
}

int cmd_replay(const std::string& log_path, double hz, double realtime_factor, const std::string& out) {
  const auto log = sim::read_csv_file(log_path);
  std::ofstream file;
  if (!out.empty() && out != "-") {
    file.open(out, std::ios::binary);
    if (!file) throw Error("cannot open '" + out + "' for writing");
  }
  std::ostream& os = file.is_open() ? file : std::cout;
  svc::TelemetryDecimator dec(hz);
  const auto origin = std::chrono::steady_clock::now();
  const double t0 = log.rows.empty() ? 0.0 : log.rows.front().t;
  for (const auto& row : log.rows) {
    if (!dec.accept(row.t)) continue;
    if (realtime_factor > 0) {
      std::this_thread::sleep_until(origin + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                 std::chrono::duration<double>((row.t - t0) / realtime_factor)));
    }
    os << svc::encode_telemetry(svc::frame_from_row(row)) << '\n';
    if (realtime_factor > 0) os.flush();
  }
  return 0;
}

std::atomic<bool> g_interrupted{false};

int cmd_serve(const std::string& config, const std::string& mode, const svc::ServerOptions& opts) {
  const auto path = config_path(config);
  sim::ScenarioConfig cfg = path ? sim::load_config(*path) : sim::ScenarioConfig{};
  if (!mode.empty()) cfg.mode = sim::mode_from_string(mode);
  cfg.validate();
  svc::Server server(cfg, opts);
  server.start();
  std::cout << "listening on ws://" << opts.address << ":" << server.port() << "/ws" << std::endl;
  std::signal(SIGINT, [](int) { g_interrupted = true; });
  std::signal(SIGTERM, [](int) { g_interrupted = true; });
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return 0;
}

int cmd_defaults(const std::string& out) {
  const std::string text = sim::config_to_json(sim::ScenarioConfig{}).dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error("cannot open '" + out + "' for writing");
  f << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plug-pulling aerial teleoperation simulator"};
  app.require_subcommand(1);

  std::string config, mode, out, csv_dir, log_path;
  std::optional<std::uint64_t> seed;
  double replay_hz = 30.0;
  double replay_rt = 0.0;
  svc::ServerOptions serve_opts;

  auto* run = app.add_subcommand("run", "Run one scenario and write its CSV log");
  run->add_option("--config", config, "Scenario JSON (default: $PLUGPULL_CONFIG)");
  run->add_option("--mode", mode, "baseline or proposed (default: from config)")
      ->check(CLI::IsMember({"baseline", "proposed"}));
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out, "CSV path, - for stdout");

  auto* compare = app.add_subcommand("compare", "Run both modes and print the overshoot table");
  compare->add_option("--config", config, "Scenario JSON (default: $PLUGPULL_CONFIG)");
  compare->add_option("--seed", seed, "Override the scenario seed");
  compare->add_option("--out", out, "Also write the table here");
  compare->add_option("--csv-dir", csv_dir, "Write baseline.csv and proposed.csv here");

  auto* replay = app.add_subcommand("replay", "Re-emit telemetry frames (JSON lines) from a CSV log");
  replay->add_option("--log", log_path, "CSV log from run")->required();
  replay->add_option("--rate", replay_hz, "Telemetry rate [Hz]")->check(CLI::PositiveNumber);
  replay->add_option("--realtime", replay_rt, "Pace output at this multiple of sim time (0 = no pacing)")
      ->check(CLI::NonNegativeNumber);
  replay->add_option("--out", out, "Output path, - for stdout");

  double window = 5.0;
  auto* metrics = app.add_subcommand("metrics", "Overshoot metrics of a CSV log");
  metrics->add_option("--log", log_path, "CSV log from run")->required();
  metrics->add_option("--window", window, "Overshoot window after separation [s]")
      ->check(CLI::PositiveNumber);

  auto* serve = app.add_subcommand("serve", "Live mode over WebSocket at /ws");
  serve->add_option("--config", config, "Scenario JSON (default: $PLUGPULL_CONFIG, else built-in)");
  serve->add_option("--mode", mode, "baseline or proposed")->check(CLI::IsMember({"baseline", "proposed"}));
  serve->add_option("--port", serve_opts.port, "TCP port, 0 for any free port");
  serve->add_option("--address", serve_opts.address, "Bind address");
  serve->add_option("--realtime-factor", serve_opts.realtime_factor,
                    "Sim seconds per wall second (0 = unpaced)")
      ->check(CLI::NonNegativeNumber);

  auto* defaults = app.add_subcommand("defaults", "Print the default scenario config");
  defaults->add_option("--out", out, "Output path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return cmd_run(config, mode, seed, out);
    if (*compare) return cmd_compare(config, seed, out, csv_dir);
    if (*metrics) return cmd_metrics(log_path, window);
    if (*replay) return cmd_replay(log_path, replay_hz, replay_rt, out);
    if (*serve) return cmd_serve(config, mode, serve_opts);
    if (*defaults) return cmd_defaults(out);
  } catch (const Usage& u) {
    std::cerr << "plugpull: " << u.message << "\n\n" << app.get_subcommands().front()->help();
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "plugpull: config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "plugpull: " << e.what() << "\n";
    return 1;
  }
  return kUsage;
}
