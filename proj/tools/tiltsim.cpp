// tiltsim: run closed-loop simulations and write telemetry + metrics.
//
// Exit codes: 0 success, 1 bad usage/config, 2 controller or plant failure,
// 3 I/O failure.

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tiltvtol/sim.hpp"

namespace fs = std::filesystem;
using namespace tiltvtol;

namespace {

enum Exit { kOk = 0, kUsage = 1, kSimFailure = 2, kIoFailure = 3 };

struct Overrides {
  std::optional<std::string> out;
  std::optional<double> dt;
  std::optional<double> duration;
  std::optional<int> csv_decimate;

  void add_to(CLI::App* app) {
    app->add_option("--out", out, "Output directory");
    app->add_option("--dt", dt, "Integration step, s");
    app->add_option("--duration", duration, "Simulated time, s");
    app->add_option("--csv-decimate", csv_decimate, "Write every Nth telemetry row")
        ->check(CLI::PositiveNumber);
  }

  ScenarioConfig apply(ScenarioConfig c) const {
    if (out) c.output_dir = *out;
    if (dt) c.dt = *dt;
    if (duration) c.duration = *duration;
    if (csv_decimate) c.csv_decimate = *csv_decimate;
    c.validate();
    return c;
  }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text << '\n';
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

/// Runs one scenario into `dir`. On a simulation failure the partial
/// telemetry is still written.
int run_into(const ScenarioConfig& c, const fs::path& dir, std::ostream& log) {
  fs::create_directories(dir);
  save_config(c, dir / "config.json");
  try {
    const RunResult r = run(c);
    write_csv(r.log, dir / "telemetry.csv", c.csv_decimate);
    write_text(dir / "metrics.json", metrics_json(r.metrics, r.diagnostics));
    log << c.name << ": rms position error " << r.metrics.rms_position_error << " m, max tilt "
        << r.metrics.max_tilt_deg << " deg, max inclination " << r.metrics.max_inclination_deg
        << " deg -> " << dir.string() << '\n';
    return kOk;
  } catch (const SimulationFailure& f) {
    write_csv(f.partial_log(), dir / "telemetry.csv", c.csv_decimate);
    log << "error: " << f.what() << '\n';
    return kSimFailure;
  }
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::kInvalidConfig: return kUsage;
      case ErrorCode::kIo: return kIoFailure;
      default: return kSimFailure;
    }
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}

std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' || ch == '_')) {
      ch = '_';
    }
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thrust-tilting VTOL closed-loop simulator"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides run_opts;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario from a JSON config");
  run_cmd->add_option("config", config_path, "Scenario config (JSON)")->required();
  run_opts.add_to(run_cmd);

  Overrides sim1_opts, sim2_opts;
  auto* sim1 = app.add_subcommand("paper-sim1", "Figure-eight at a_r = 2 pi / 15 rad/s");
  sim1_opts.add_to(sim1);
  auto* sim2 = app.add_subcommand("paper-sim2", "Figure-eight at a_r = pi / 5 rad/s");
  sim2_opts.add_to(sim2);

  std::string sweep_config, param;
  std::vector<std::string> values;
  unsigned jobs = 0;
  Overrides sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "Run a config once per value of one parameter");
  sweep->add_option("config", sweep_config, "Base scenario config (JSON)")->required();
  sweep->add_option("--param", param, "Dotted parameter path, e.g. gains.k1")->required();
  sweep->add_option("--values", values, "JSON values to substitute")->required()->expected(1, -1);
  sweep->add_option("--jobs", jobs, "Parallel runs (0 = hardware concurrency)");
  sweep_opts.add_to(sweep);

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) {
    return guarded([&] {
      const ScenarioConfig c = run_opts.apply(load_config(config_path));
      return run_into(c, c.output_dir, std::cout);
    });
  }
  if (sim1->parsed() || sim2->parsed()) {
    return guarded([&] {
      const bool first = sim1->parsed();
      ScenarioConfig c = first ? figure_eight_slow() : figure_eight_fast();
      c.output_dir = first ? "out/paper-sim1" : "out/paper-sim2";
      c = (first ? sim1_opts : sim2_opts).apply(c);
      return run_into(c, c.output_dir, std::cout);
    });
  }
  return guarded([&] {
    const ScenarioConfig base = sweep_opts.apply(load_config(sweep_config));
    std::vector<ScenarioConfig> runs;
    for (const auto& v : values) {
      ScenarioConfig c = with_override(base, param, v);
      c.name = base.name + "[" + param + "=" + v + "]";
      runs.push_back(std::move(c));
    }

    const unsigned width = jobs > 0 ? jobs : std::max(1u, std::thread::hardware_concurrency());
    std::vector<int> codes(runs.size(), kOk);
    std::vector<std::string> logs(runs.size());
    for (std::size_t begin = 0; begin < runs.size(); begin += width) {
      std::vector<std::future<void>> batch;
      for (std::size_t i = begin; i < std::min(runs.size(), begin + width); ++i) {
        batch.push_back(std::async(std::launch::async, [&, i] {
          std::ostringstream log;
          codes[i] = guarded([&] {
            return run_into(runs[i], fs::path(base.output_dir) / sanitize(param + "=" + values[i]),
                            log);
          });
          logs[i] = log.str();
        }));
      }
      for (auto& f : batch) f.get();
    }

    int worst = kOk;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      std::cout << logs[i];
      worst = std::max(worst, codes[i]);
    }
    return worst;
  });
}
