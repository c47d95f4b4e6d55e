#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "s2s/codec.hpp"
#include "s2s/config.hpp"
#include "s2s/error.hpp"
#include "s2s/grid_io.hpp"
#include "s2s/metrics.hpp"
#include "s2s/pipeline.hpp"
#include "s2s/scene.hpp"

using namespace s2s;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("s2s_pipeline_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

json base_config(const fs::path& out, const std::string& trajectory = "pan", std::size_t frames = 6,
                 std::size_t s = 2) {
  return json{{"canvas", {{"orig_h", 16}, {"orig_w", 16}, {"canvas_h", 16}, {"canvas_w", 32}, {"offset_x", 8}, {"downsample", s}}},
              {"window", 3},
              {"seed", 7},
              {"input", {{"scene", {{"world_h", 16}, {"world_w", 64}, {"num_frames", frames}, {"trajectory", trajectory}, {"dx", 2.0}, {"start_x", 8.0}}}}},
              {"output_dir", out.string()}};
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(S2S_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const json j = base_config("out");
  const PipelineConfig c = config_from_json(j);
  CHECK(c.window == 3);
  CHECK(*c.seed == 7);
  CHECK(c.canvas.canvas_w == 32);
  CHECK(c.input.scene->trajectory.dx == 2.0);
  CHECK_NOTHROW(c.validate());
  CHECK(config_from_json(config_to_json(c)).window == 3);
  CHECK(config_to_json(config_from_json(config_to_json(c))) == config_to_json(c));

  json unknown = j;
  unknown["windwo"] = 4;
  CHECK_THROWS_AS(config_from_json(unknown), ConfigError);
  json no_seed = j;
  no_seed.erase("seed");
  CHECK_THROWS_AS(config_from_json(no_seed).validate(), ConfigError);
  json bad_window = j;
  bad_window["window"] = 0;
  CHECK_THROWS_AS(config_from_json(bad_window).validate(), ConfigError);
  json bad_method = j;
  bad_method["completion"] = {{"method", "learned"}};
  CHECK_THROWS_AS(config_from_json(bad_method).validate(), ConfigError);
  json bad_type = j;
  bad_type["window"] = "four";
  CHECK_THROWS_AS(config_from_json(bad_type), ConfigError);
  json bad_canvas = j;
  bad_canvas["canvas"]["offset_x"] = 20;
  CHECK_THROWS_AS(config_from_json(bad_canvas).validate(), ConfigError);
  json sampler = j;
  sampler["sampler"] = {{"enabled", true}, {"denoiser", "mystery"}};
  CHECK_THROWS_AS(config_from_json(sampler).validate(), ConfigError);
  json sched = j;
  sched["schedule"] = {{"T", 10}, {"beta_start", 0.1}, {"beta_end", 0.2}};
  CHECK(config_from_json(sched).schedule.steps == 10);
}

TEST_CASE("stage seeds are stable and distinct") {
  CHECK(stage_seed(1, "scene") == stage_seed(1, "scene"));
  CHECK(stage_seed(1, "scene") != stage_seed(1, "sample"));
  CHECK(stage_seed(1, "scene") != stage_seed(2, "scene"));
}

TEST_CASE("static scene end to end") {
  const fs::path out = scratch("static");
  const PipelineSummary s = run_pipeline(config_from_json(base_config(out, "static")), PipelineMode::propagate);
  CHECK(s.complete);
  CHECK(s.metrics["covered_max_abs_error"] == 0.0);
  CHECK(s.metrics["source_max_abs_error"] == 0.0);
  const BinaryMask cov = read_mask(out / "coverage_0003.s2sg");
  CHECK(cov == make_outpaint_mask(CanvasSpec{16, 16, 16, 32, 0, 8, 2}.latent()).inverted());
  CHECK(read_channel_grid(out / "latent_0002.s2sg") == read_channel_grid(out / "latent_0004.s2sg"));
}

TEST_CASE("panning scene: covered cells are exact") {
  const fs::path out = scratch("pan");
  const PipelineSummary s = run_pipeline(config_from_json(base_config(out)), PipelineMode::propagate);
  CHECK(s.metrics["covered_psnr"] == "inf");
  CHECK(s.metrics["covered_max_abs_error"] == 0.0);
  CHECK(s.metrics["covered_outpaint_cells"].get<std::size_t>() > 0);
  CHECK(s.metrics["reachable_coverage"].get<double>() == 1.0);
  CHECK(s.report.ordering_holds());
  CHECK(s.report.guided_warps == 6 * s.chain.size() - s.chain.size());
  const json summary = read_json(out / "summary.json");
  CHECK(summary["complete"] == true);
  CHECK(summary["chain"] == chain_to_json(s.chain));
  CHECK_FALSE(summary["report"].contains("stage_ms"));
  CHECK(read_json(out / "chain.json") == chain_to_json(s.chain));
  const json side = read_json(out / "propagation_0001.json");
  CHECK(side["warp_count"] == s.chain.size());
  CHECK(side["provenance"].size() == 8 * 16);
  for (std::size_t i = 0; i < 6; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "decoded_%04zu.s2sg", i);
    CHECK(read_channel_grid(out / name).width == 32);
  }
}

TEST_CASE("pixel-resolution completion gives the same exact result on integer pans") {
  const fs::path out = scratch("pixel");
  json j = base_config(out);
  j["completion"] = {{"at_pixel", true}, {"order", "red_black"}};
  const PipelineSummary s = run_pipeline(config_from_json(j), PipelineMode::propagate);
  CHECK(s.metrics["covered_psnr"] == "inf");
}

TEST_CASE("source region survives decoding at s = 1") {
  const fs::path out = scratch("s1");
  const PipelineConfig c = config_from_json(base_config(out, "pan", 5, 1));
  run_pipeline(c, PipelineMode::propagate);
  SceneSpec spec = *c.input.scene;
  spec.canvas = c.canvas;
  spec.seed = stage_seed(7, "scene");
  const SyntheticScene scene = generate_scene(spec);
  for (std::size_t i = 0; i < 5; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "decoded_%04zu.s2sg", i);
    CHECK(crop_from_canvas(read_channel_grid(out / name), c.canvas) == scene.frame(i));
  }
}

TEST_CASE("sampling with a single frame") {
  const fs::path out = scratch("single");
  json j = base_config(out, "pan", 1);
  j["schedule"] = {{"T", 5}};
  const PipelineSummary s = run_pipeline(config_from_json(j), PipelineMode::sample);
  CHECK(s.chain.indices == std::vector<std::size_t>{0});
  CHECK(fs::exists(out / "sampled_0000.s2sg"));
  CHECK(s.report.guided_warps == 0);
}

TEST_CASE("oracle sampling reproduces the ground-truth latents") {
  const fs::path out = scratch("oracle");
  json j = base_config(out, "pan", 6);
  j["schedule"] = {{"T", 20}};
  j["sampler"] = {{"denoiser", "oracle"}, {"window", 4}, {"stride", 2}};
  const PipelineConfig c = config_from_json(j);
  const PipelineSummary s = run_pipeline(c, PipelineMode::sample);
  SceneSpec spec = *c.input.scene;
  spec.canvas = c.canvas;
  spec.seed = stage_seed(7, "scene");
  const SyntheticScene scene = generate_scene(spec);
  const ChannelGrid want = stand_in_encode(scene.expanded_truth(3), 2);
  const ChannelGrid got = read_channel_grid(out / "sampled_0003.s2sg");
  for (std::size_t k = 0; k < want.data.size(); ++k) CHECK(std::abs(got.data[k] - want.data[k]) <= 1e-4);
  double ceiling = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    const ChannelGrid truth = scene.expanded_truth(i);
    ceiling += ssim_full(stand_in_decode(stand_in_encode(truth, 2), 2), truth) / 6.0;
  }
  CHECK(s.metrics["sampled_mean_ssim"].get<double>() == doctest::Approx(ceiling).epsilon(1e-3));
}

TEST_CASE("file inputs reproduce the synthetic run") {
  const fs::path synth = scratch("files_in"), a = scratch("files_a"), b = scratch("files_b");
  const fs::path log = synth / "log.txt";
  json j = base_config(synth);
  std::ofstream(synth / "config.json") << j.dump();
  REQUIRE(run_cli("synth -c " + (synth / "config.json").string() + " --seed 7 -o " + synth.string(), log) == 0);
  CHECK(fs::exists(synth / "flow_0000_0003.s2sg"));

  j["output_dir"] = a.string();
  run_pipeline(config_from_json(j), PipelineMode::propagate);
  json f = base_config(b);
  f["input"] = {{"frames_dir", synth.string()}};
  run_pipeline(config_from_json(f), PipelineMode::propagate);
  for (const char* name : {"latent_0002.s2sg", "coverage_0004.s2sg", "propagation_0001.json", "chain.json"}) {
    CHECK_MESSAGE(slurp(a / name) == slurp(b / name), name);
  }
}

TEST_CASE("stage failures are reported and flagged incomplete") {
  const fs::path in = scratch("broken_in"), out = scratch("broken_out");
  {
    const SyntheticScene scene = [] {
      SceneSpec s;
      s.seed = 3;
      s.num_frames = 4;
      s.canvas = CanvasSpec{16, 16, 16, 32, 0, 8, 2};
      s.world_h = 16;
      s.world_w = 64;
      s.trajectory.dx = 2.0;
      s.trajectory.start_x = 8.0;
      return generate_scene(s);
    }();
    for (std::size_t i = 0; i < 4; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "frame_%04zu.s2sg", i);
      write_grid(in / name, scene.frame(i));
    }
  }
  json j = base_config(out);
  j["input"] = {{"frames_dir", in.string()}};
  try {
    run_pipeline(config_from_json(j), PipelineMode::propagate);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "flows");
  }
  const json summary = read_json(out / "summary.json");
  CHECK(summary["complete"] == false);
  CHECK(summary["failed_stage"] == "flows");
}

TEST_CASE("benchmark grid") {
  BenchmarkConfig cfg;
  cfg.frame_counts = {8, 12};
  cfg.windows = {1, 2, 3, 4};
  cfg.crop = 16;
  cfg.margin = 4;
  const auto reports = run_benchmark(cfg);
  REQUIRE(reports.size() == 8);
  for (const auto& r : reports) {
    CHECK(r.ordering_holds());
    CHECK(r.all_pairs_warps == r.num_frames * (r.num_frames - 1));
    if (r.window == 1) {
      CHECK(r.chain_length == r.num_frames);
      CHECK(r.guided_warps == r.sequential_warps);
    }
    CHECK(r.peak_bytes > 0);
  }
  for (std::size_t k = 1; k < 4; ++k) CHECK(reports[k].chain_length <= reports[k - 1].chain_length);
  const std::string csv = benchmark_csv(reports);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
  CHECK(csv.rfind("num_frames,window,chain_length,", 0) == 0);
  const json rj = report_to_json(reports[0], true);
  CHECK(rj.contains("stage_ms"));
  CHECK_FALSE(report_to_json(reports[0], false).contains("stage_ms"));

  cfg.trajectory = TrajectoryKind::fixed;
  cfg.frame_counts = {48};
  cfg.windows = {4};
  const auto identical = run_benchmark(cfg);
  CHECK(identical[0].chain_length == 13);
  CHECK(identical[0].guided_warps <= 2 * 48 * 12);
  CHECK(identical[0].guided_warps < 2256);
}

TEST_CASE("command line") {
  const fs::path dir = scratch("cli");
  const fs::path log = dir / "log.txt";
  json j = base_config(dir / "out");
  std::ofstream(dir / "config.json") << j.dump();
  const std::string cfg = (dir / "config.json").string();

  CHECK(run_cli("chain -c " + cfg, log) == 0);
  const json chain = json::parse(slurp(log));
  CHECK(chain.is_array());
  CHECK(chain.front() == 0);
  CHECK(chain.back() == 5);
  CHECK(run_cli("chain -c " + cfg + " -m 1", log) == 0);
  CHECK(json::parse(slurp(log)).size() == 6);

  CHECK(run_cli("synth -c " + cfg + " -o " + (dir / "synth").string(), log) == 2);
  CHECK(run_cli("sample -c " + cfg + " -T 3", log) == 2);
  CHECK(run_cli("sample -c " + cfg + " --seed 3 -T 3 -o " + (dir / "sampled").string(), log) == 0);
  CHECK(fs::exists(dir / "sampled" / "sampled_0005.s2sg"));
  CHECK(run_cli("propagate -c " + cfg + " --seed 9 --timings", log) == 0);
  CHECK(read_json(dir / "out" / "summary.json")["report"].contains("stage_ms"));
  CHECK(read_json(dir / "out" / "summary.json")["config"]["seed"] == 9);

  CHECK(run_cli("bogus", log) == 2);
  CHECK(run_cli("propagate -c " + cfg + " -m 0", log) == 2);
  std::ofstream(dir / "bad.json") << "{\"canvas\": {}}";
  CHECK(run_cli("propagate -c " + (dir / "bad.json").string(), log) == 2);
  std::ofstream(dir / "broken.json") << "{not json";
  CHECK(run_cli("propagate -c " + (dir / "broken.json").string(), log) == 2);

  json missing = j;
  missing["input"] = {{"frames_dir", (dir / "nowhere").string()}};
  std::ofstream(dir / "missing.json") << missing.dump();
  CHECK(run_cli("propagate -c " + (dir / "missing.json").string(), log) == 3);

  CHECK(run_cli("bench --frames 8 --windows 2..3 --trajectory static", log) == 0);
  CHECK(slurp(log).rfind("num_frames,", 0) == 0);
  CHECK(run_cli("bench --trajectory zigzag", log) == 2);

  const fs::path out = dir / "out";
  CHECK(run_cli("metrics " + (out / "decoded_0001.s2sg").string() + " " + (out / "decoded_0001.s2sg").string(), log) == 0);
  CHECK(json::parse(slurp(log))["psnr"] == "inf");
}
