#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "s2s/config.hpp"
#include "s2s/error.hpp"
#include "s2s/grid_io.hpp"
#include "s2s/metrics.hpp"
#include "s2s/pipeline.hpp"
#include "s2s/ref_select.hpp"
#include "s2s/scene.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> window;
  std::optional<std::string> output;
  std::optional<std::string> denoiser;
  std::optional<std::size_t> steps;
  bool noise_condition = false;
  bool timings = false;
};

void add_common(CLI::App* cmd, Overrides& o, bool seed_required) {
  cmd->add_option("-c,--config", o.config_path, "JSON config file")->required()->check(CLI::ExistingFile);
  auto* seed = cmd->add_option("--seed", o.seed, "root seed for every random stream");
  if (seed_required) seed->required();
  cmd->add_option("-m,--window", o.window, "reference search window");
  cmd->add_option("-o,--output", o.output, "output directory");
}

s2s::PipelineConfig resolve(const Overrides& o) {
  s2s::PipelineConfig c = s2s::load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.window) c.window = *o.window;
  if (o.output) c.output_dir = *o.output;
  if (o.denoiser) c.sampler.denoiser = *o.denoiser;
  if (o.steps) c.schedule.steps = *o.steps;
  if (o.noise_condition) c.sampler.noise_condition = true;
  if (o.timings) c.record_timings = true;
  return c;
}

std::vector<s2s::ChannelGrid> load_frames(const s2s::PipelineConfig& c) {
  if (c.input.scene) {
    if (!c.seed) throw s2s::ConfigError("a synthetic scene needs a seed");
    s2s::SceneSpec spec = *c.input.scene;
    spec.canvas = c.canvas;
    spec.seed = s2s::stage_seed(*c.seed, "scene");
    return s2s::generate_scene(spec).frames();
  }
  std::vector<s2s::ChannelGrid> frames;
  for (std::size_t i = 0;; ++i) {
    if (c.input.num_frames && i == c.input.num_frames) break;
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.s2sg", i);
    const auto path = c.input.frames_dir / name;
    if (!c.input.num_frames && !std::filesystem::exists(path)) break;
    frames.push_back(s2s::read_channel_grid(path));
  }
  if (frames.empty()) throw s2s::ConfigError("no input frames found");
  return frames;
}

void write_synth(const s2s::PipelineConfig& c, const std::filesystem::path& dir) {
  if (!c.input.scene) throw s2s::ConfigError("synth needs input.scene in the config");
  s2s::SceneSpec spec = *c.input.scene;
  spec.canvas = c.canvas;
  spec.seed = s2s::stage_seed(*c.seed, "scene");
  const s2s::SyntheticScene scene = s2s::generate_scene(spec);
  std::filesystem::create_directories(dir);
  char name[64];
  const std::size_t n = scene.num_frames();
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(name, sizeof name, "frame_%04zu.s2sg", i);
    s2s::write_grid(dir / name, scene.frame(i));
    std::snprintf(name, sizeof name, "truth_%04zu.s2sg", i);
    s2s::write_grid(dir / name, scene.expanded_truth(i));
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      std::snprintf(name, sizeof name, "flow_%04zu_%04zu.s2sg", i, j);
      s2s::write_grid(dir / name, scene.flow(i, j));
    }
  }
  nlohmann::json origins = nlohmann::json::array();
  for (const auto& o : scene.origins) origins.push_back({o.x, o.y});
  std::ofstream(dir / "scene.json") << nlohmann::json{{"num_frames", n}, {"origins", origins}}.dump(2) << '\n';
}

std::vector<std::size_t> parse_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    const std::size_t dots = item.find("..");
    try {
      if (dots != std::string::npos) {
        const std::size_t lo = std::stoul(item.substr(0, dots)), hi = std::stoul(item.substr(dots + 2));
        for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
      } else {
        out.push_back(std::stoul(item));
      }
    } catch (const std::exception&) {
      throw s2s::ConfigError("bad list item '" + item + "'");
    }
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"s2s: reference-guided latent propagation for video outpainting"};
  app.require_subcommand(1);

  Overrides chain_o, prop_o, sample_o, synth_o;
  auto* chain_cmd = app.add_subcommand("chain", "print the reference chain as a JSON array");
  add_common(chain_cmd, chain_o, false);

  auto* prop_cmd = app.add_subcommand("propagate", "run propagation and write artifacts");
  add_common(prop_cmd, prop_o, false);
  prop_cmd->add_flag("--timings", prop_o.timings, "record stage timings in summary.json");

  auto* sample_cmd = app.add_subcommand("sample", "propagate, then run the diffusion sampler");
  add_common(sample_cmd, sample_o, true);
  sample_cmd->add_option("--denoiser", sample_o.denoiser, "zero | constant:<c> | oracle");
  sample_cmd->add_option("-T,--steps", sample_o.steps, "diffusion steps");
  sample_cmd->add_flag("--noise-condition", sample_o.noise_condition, "noise the condition to level t");
  sample_cmd->add_flag("--timings", sample_o.timings, "record stage timings in summary.json");

  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic scene as S2SG frames and flows");
  add_common(synth_cmd, synth_o, true);

  s2s::BenchmarkConfig bench;
  std::string bench_frames = "16,32,48,64", bench_windows = "2..7", bench_traj = "pan", bench_csv_path;
  auto* bench_cmd = app.add_subcommand("bench", "warp-count benchmark over (N, m), CSV on stdout");
  bench_cmd->add_option("--frames", bench_frames, "frame counts, e.g. 16,32 or 8..12");
  bench_cmd->add_option("--windows", bench_windows, "window sizes");
  bench_cmd->add_option("--trajectory", bench_traj, "static | pan | pingpong");
  bench_cmd->add_option("--seed", bench.seed, "scene seed");
  bench_cmd->add_option("--csv", bench_csv_path, "also write the CSV here");

  std::string metric_a, metric_b, metric_mask;
  double peak = 1.0;
  auto* metrics_cmd = app.add_subcommand("metrics", "PSNR and SSIM between two S2SG grids");
  metrics_cmd->add_option("a", metric_a)->required()->check(CLI::ExistingFile);
  metrics_cmd->add_option("b", metric_b)->required()->check(CLI::ExistingFile);
  metrics_cmd->add_option("--mask", metric_mask, "restrict PSNR to mask=1 cells")->check(CLI::ExistingFile);
  metrics_cmd->add_option("--peak", peak, "signal peak");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  auto number = [](double v) -> nlohmann::json {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
  };

  try {
    if (chain_cmd->parsed()) {
      const auto c = resolve(chain_o);
      if (c.window < 1) throw s2s::ConfigError("window must be >= 1");
      std::cout << s2s::chain_to_json(s2s::build_reference_chain(load_frames(c), c.window)).dump() << '\n';
    } else if (prop_cmd->parsed() || sample_cmd->parsed()) {
      const bool sampling = sample_cmd->parsed();
      const auto c = resolve(sampling ? sample_o : prop_o);
      const auto summary =
          s2s::run_pipeline(c, sampling ? s2s::PipelineMode::sample : s2s::PipelineMode::propagate);
      std::cout << s2s::report_to_json(summary.report, c.record_timings).dump(2) << '\n';
    } else if (synth_cmd->parsed()) {
      auto c = resolve(synth_o);
      write_synth(c, c.output_dir);
    } else if (bench_cmd->parsed()) {
      bench.frame_counts = parse_list(bench_frames);
      bench.windows = parse_list(bench_windows);
      try {
        bench.trajectory = s2s::parse_trajectory(bench_traj);
      } catch (const s2s::Error& e) {
        throw s2s::ConfigError(e.what());
      }
      const std::string csv = s2s::benchmark_csv(s2s::run_benchmark(bench));
      std::cout << csv;
      if (!bench_csv_path.empty()) std::ofstream(bench_csv_path) << csv;
    } else if (*metrics_cmd) {
      const auto a = s2s::read_channel_grid(metric_a);
      const auto b = s2s::read_channel_grid(metric_b);
      nlohmann::json j;
      j["psnr"] = number(metric_mask.empty() ? s2s::psnr(a, b, peak)
                                             : s2s::psnr_masked(a, b, s2s::read_mask(metric_mask), peak));
      j["ssim"] = s2s::ssim_full(a, b, peak);
      std::cout << j.dump(2) << '\n';
    }
  } catch (const s2s::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStage;
  }
  return 0;
}
