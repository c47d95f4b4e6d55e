#include <cmath>
#include <cstdio>

#include "pipeline_internal.hpp"
#include "s2s/error.hpp"
#include "s2s/scene.hpp"

namespace s2s {

using nlohmann::json;
using namespace internal;

json report_to_json(const BenchmarkReport& r, bool with_timings) {
  json j;
  j["num_frames"] = r.num_frames;
  j["window"] = r.window;
  j["chain_length"] = r.chain_length;
  j["guided_warps"] = r.guided_warps;
  j["sequential_warps"] = r.sequential_warps;
  j["all_pairs_warps"] = r.all_pairs_warps;
  j["guided_compositions"] = r.guided_compositions;
  j["peak_bytes_estimate"] = r.peak_bytes;
  if (with_timings) j["stage_ms"] = r.stage_ms;
  return j;
}

SceneSpec benchmark_scene(const BenchmarkConfig& config, std::size_t num_frames) {
  SceneSpec spec;
  spec.seed = stage_seed(config.seed, "bench-scene-" + std::to_string(num_frames));
  spec.num_frames = num_frames;
  spec.canvas = CanvasSpec{config.crop, config.crop, config.crop, config.crop + 2 * config.margin,
                           0, config.margin, config.downsample};
  spec.trajectory.kind = config.trajectory;
  spec.trajectory.dx = config.trajectory == TrajectoryKind::fixed ? 0.0 : config.speed;
  spec.trajectory.start_x = static_cast<double>(config.margin);
  spec.trajectory.leg = 8;
  double extent = 0.0;
  if (config.trajectory == TrajectoryKind::pan) extent = config.speed * static_cast<double>(num_frames - 1);
  if (config.trajectory == TrajectoryKind::ping_pong) extent = config.speed * 8.0;
  spec.world_h = config.crop;
  spec.world_w = config.crop + 2 * config.margin + static_cast<std::size_t>(std::ceil(extent)) + 1;
  return spec;
}

std::vector<BenchmarkReport> run_benchmark(const BenchmarkConfig& config) {
  if (config.frame_counts.empty() || config.windows.empty()) {
    throw ValueError("run_benchmark: empty parameter grid");
  }
  struct SceneData {
    SyntheticScene scene;
    std::vector<ChannelGrid> frames;
    std::vector<ScalarGrid> gray;
  };
  std::vector<SceneData> scenes;
  for (std::size_t n : config.frame_counts) {
    SceneData d{generate_scene(benchmark_scene(config, n)), {}, {}};
    d.frames = d.scene.frames();
    for (const auto& f : d.frames) d.gray.push_back(to_grayscale(f));
    scenes.push_back(std::move(d));
  }

  const std::size_t nm = config.windows.size();
  std::vector<BenchmarkReport> reports(config.frame_counts.size() * nm);
  const LaplacianCompleter completer;
  const BaselineAligner aligner;
  const BaselineFuser fuser;
  parallel_for_each(reports.size(), [&](std::size_t cell) {
    const SceneData& d = scenes[cell / nm];
    const std::size_t m = config.windows[cell % nm];
    const std::size_t n = d.frames.size();
    const CanvasSpec& spec = d.scene.spec.canvas;
    StageClock clock;
    const ReferenceChain chain = clock.run("chain", [&] { return build_reference_chain_gray(d.gray, m); });
    FlowSet flows = clock.run("flows", [&] {
      return prepare_flow_set(
          chain, spec, [&](std::size_t t, std::size_t r) { return d.scene.flow(t, r); }, completer);
    });
    const std::vector<ChannelGrid> latents = encode_on_canvas(d.frames, spec);
    const std::vector<BinaryMask> masks(n, make_outpaint_mask(spec.latent()));
    SequenceResult seq = clock.run("propagate", [&] {
      PropagationInputs in{chain, latents, masks, flows};
      return propagate_sequence(in, aligner, fuser);
    });
    BenchmarkReport& r = reports[cell];
    r.num_frames = n;
    r.window = m;
    r.chain_length = chain.size();
    r.guided_warps = seq.total_warps;
    r.guided_compositions = seq.total_compositions;
    r.sequential_warps = seq.analytic.sequential;
    r.all_pairs_warps = seq.analytic.all_pairs;
    r.stage_ms = clock.ms();
    r.peak_bytes = bytes_of(d.frames) + bytes_of(flows) + bytes_of(latents) + bytes_of(masks) +
                   bytes_of(seq.frames);
  });
  for (const auto& r : reports) {
    if (!r.ordering_holds()) {
      throw Error("benchmark cell N=" + std::to_string(r.num_frames) + " m=" + std::to_string(r.window) +
                  " breaks guided <= sequential <= all-pairs");
    }
  }
  return reports;
}

std::string benchmark_csv(const std::vector<BenchmarkReport>& reports) {
  std::string out =
      "num_frames,window,chain_length,guided_warps,sequential_warps,all_pairs_warps,"
      "guided_compositions,chain_ms,flows_ms,propagate_ms,peak_bytes_estimate\n";
  char buf[256];
  for (const auto& r : reports) {
    auto ms = [&](const char* k) {
      auto it = r.stage_ms.find(k);
      return it == r.stage_ms.end() ? 0.0 : it->second;
    };
    std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%zu,%zu,%zu,%zu,%.3f,%.3f,%.3f,%zu\n", r.num_frames,
                  r.window, r.chain_length, r.guided_warps, r.sequential_warps, r.all_pairs_warps,
                  r.guided_compositions, ms("chain"), ms("flows"), ms("propagate"), r.peak_bytes);
    out += buf;
  }
  return out;
}

}  // namespace s2s
