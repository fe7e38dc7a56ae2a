// setscope command-line tool: serve, batch, detect, simulate, evaluate, render.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "setscope/batch.hpp"
#include "setscope/config.hpp"
#include "setscope/pgm.hpp"
#include "setscope/pipeline.hpp"
#include "setscope/service.hpp"
#include "setscope/session.hpp"
#include "setscope/simulate.hpp"

#ifndef SETSCOPE_DEFAULT_CONFIG
#define SETSCOPE_DEFAULT_CONFIG "config/default.toml"
#endif

namespace fs = std::filesystem;
using namespace setscope;

namespace {

void write_json(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

EngineConfig config_or_default(const std::string& path) {
  return load_config(path.empty() ? fs::path(SETSCOPE_DEFAULT_CONFIG) : fs::path(path));
}

Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->server().stop();
}

int cmd_serve(int port, const std::string& host, const std::string& data_dir,
              const std::string& config) {
  std::optional<EngineConfig> defaults;
  if (!config.empty()) defaults = load_config(config);
  SessionManager sessions(data_dir);
  Service service(sessions, defaults);
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "serving on " << host << ":" << port << " (" << sessions.ids().size()
            << " sessions restored from " << data_dir << ")\n";
  const bool ok = service.listen(host, port);
  g_service = nullptr;
  if (!ok) {
    std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
    return 1;
  }
  return 0;
}

int cmd_batch(const std::string& in, const std::string& config, const std::string& mode,
              const std::string& out) {
  const EngineConfig cfg = load_config(config);
  const BatchReport report = process_batch(in, cfg, parse_filter_mode(mode));
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& e : report.errors) std::cerr << "error: " << e << "\n";
  write_json(out, to_json(report));
  std::cerr << report.rounds.size() << " rounds processed, " << report.warnings.size()
            << " skipped, " << report.errors.size() << " failed\n";
  return report.ok() ? 0 : 1;
}

int cmd_detect(const std::string& frames_dir, const std::string& config, const std::string& out) {
  const EngineConfig cfg = load_config(config);
  const auto files = list_frames(frames_dir);
  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    frames.push_back({read_pgm(files[i]), static_cast<std::int64_t>(i), 0.0});
  }
  const auto records = detect_frames(cfg, frames);
  std::ofstream stream(out);
  if (!stream) throw Error("cannot write " + out);
  write_detection_stream(stream, to_court_view(records, cfg.calibration.frame_height),
                         cfg.calibration.frame_height);
  std::cerr << records.size() << " frames processed\n";
  return 0;
}

int cmd_simulate(const std::string& templates_file, const std::string& noise_file, int count,
                 std::optional<std::uint64_t> seed, const std::string& out,
                 const std::string& config, const std::string& layout) {
  if (count < 1) throw ValidationError("--count must be at least 1");
  EngineConfig cfg = config_or_default(config);
  const TemplateSet templates =
      templates_file.empty() ? TemplateSet{default_templates(), {}} : load_templates(templates_file);
  NoiseConfig noise = noise_file.empty() ? NoiseConfig{} : load_noise(noise_file);
  if (seed) noise.seed = *seed;

  std::vector<LabeledRound> rounds;
  if (layout == "match") {
    SimulatedMatch match =
        generate_match(templates.templates, noise, cfg.calibration, templates.simulation, count);
    cfg.initial_positions = {match.initial};
    rounds = std::move(match.rounds);
  } else if (layout == "benchmark") {
    const int per = std::max<int>(1, count / static_cast<int>(templates.templates.size()));
    rounds = generate_benchmark(templates.templates, noise, cfg.calibration, templates.simulation,
                                per);
  } else {
    throw ValidationError("--layout must be match or benchmark");
  }
  write_dataset(out, rounds, cfg.calibration);
  std::ofstream cfg_out(fs::path(out) / "config.toml");
  cfg_out << to_toml(cfg);
  std::cerr << rounds.size() << " rounds written to " << out << "\n";
  return 0;
}

int cmd_evaluate(const std::string& dataset, const std::string& mode, const std::string& report,
                 const std::string& config) {
  const fs::path cfg_path = config.empty() ? fs::path(dataset) / "config.toml" : fs::path(config);
  const EngineConfig cfg = load_config(cfg_path);
  const auto rounds = read_dataset(dataset);
  const AccuracyReport r = evaluate(rounds, parse_filter_mode(mode), cfg);
  write_json(report, to_json(r));
  std::printf("%s: %zu/%zu correct (%.2f%%), %zu no-set\n", std::string(to_string(r.mode)).c_str(),
              r.overall.correct, r.overall.total, 100.0 * r.overall.accuracy(), r.overall.no_set);
  for (TacticLabel l : kAllLabels) {
    const auto& c = r.of(l);
    if (c.total == 0) continue;
    std::printf("  %-10s %4zu/%-4zu %6.2f%%\n", std::string(to_string(l)).c_str(), c.correct,
                c.total, 100.0 * c.accuracy());
  }
  return 0;
}

int cmd_render(const std::string& stream_file, const std::string& config, const std::string& out,
               std::uint64_t seed) {
  const EngineConfig cfg = config_or_default(config);
  std::ifstream in(stream_file);
  if (!in) throw NotFoundError("cannot open " + stream_file);
  const auto records = read_detection_stream(in, cfg.calibration.frame_height);
  const auto frames = render_frames(records, cfg.calibration, seed);
  fs::create_directories(out);
  char name[32];
  for (const auto& f : frames) {
    std::snprintf(name, sizeof name, "frame_%06lld.pgm", static_cast<long long>(f.index));
    write_pgm(fs::path(out) / name, f.pixels);
  }
  std::cerr << frames.size() << " frames written to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volleyball setting-tactic analysis from ball detections"};
  app.require_subcommand(1);

  int port = 8080;
  std::string host = "127.0.0.1", data_dir = "data", config, in, mode = "plus", out;
  std::string frames_dir, templates_file, noise_file, dataset, report, layout = "match";
  std::string stream_file;
  int count = 0;
  std::optional<std::uint64_t> seed;
  std::uint64_t render_seed = 1;

  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  serve->add_option("--port", port, "TCP port")->capture_default_str();
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--data-dir", data_dir, "Session storage directory")->capture_default_str();
  serve->add_option("--config", config, "Defaults for omitted session config sections");

  auto* batch = app.add_subcommand("batch", "Analyse a directory of round detection streams");
  batch->add_option("--in", in, "Directory of score_round_team.* streams")->required();
  batch->add_option("--config", config, "Engine config (TOML)")->required();
  batch->add_option("--mode", mode, "baseline|plus")->capture_default_str();
  batch->add_option("--out", out, "Report path (JSON)")->required();

  auto* detect = app.add_subcommand("detect", "Detect ball candidates in PGM frames");
  detect->add_option("--video-frames", frames_dir, "Directory of P5 PGM frames")->required();
  detect->add_option("--config", config, "Engine config (TOML)")->required();
  detect->add_option("--out", out, "Output detection stream (NDJSON)")->required();

  auto* simulate = app.add_subcommand("simulate", "Generate a labeled synthetic dataset");
  simulate->add_option("--templates", templates_file, "Tactic templates (TOML)");
  simulate->add_option("--noise", noise_file, "Noise settings (TOML)");
  simulate->add_option("--count", count, "Number of rounds")->required();
  simulate->add_option("--seed", seed, "Seed (overrides the noise file)");
  simulate->add_option("--out", out, "Output directory")->required();
  simulate->add_option("--config", config, "Engine config providing the calibration");
  simulate->add_option("--layout", layout, "match|benchmark")->capture_default_str();

  auto* eval = app.add_subcommand("evaluate", "Score a mode against a labeled dataset");
  eval->add_option("--dataset", dataset, "Dataset directory")->required();
  eval->add_option("--mode", mode, "baseline|plus")->capture_default_str();
  eval->add_option("--report", report, "Report path (JSON)")->required();
  eval->add_option("--config", config, "Engine config (default: the dataset's config.toml)");

  auto* render = app.add_subcommand("render", "Render a detection stream as synthetic PGM frames");
  render->add_option("--stream", stream_file, "Detection stream (NDJSON)")->required();
  render->add_option("--config", config, "Engine config providing the calibration");
  render->add_option("--out", out, "Output directory")->required();
  render->add_option("--seed", render_seed, "Background seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return cmd_serve(port, host, data_dir, config);
    if (*batch) return cmd_batch(in, config, mode, out);
    if (*detect) return cmd_detect(frames_dir, config, out);
    if (*simulate) {
      return cmd_simulate(templates_file, noise_file, count, seed, out, config, layout);
    }
    if (*eval) return cmd_evaluate(dataset, mode, report, config);
    if (*render) return cmd_render(stream_file, config, out, render_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
