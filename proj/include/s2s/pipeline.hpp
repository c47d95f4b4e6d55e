#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "s2s/config.hpp"
#include "s2s/diffusion.hpp"
#include "s2s/error.hpp"
#include "s2s/flow.hpp"
#include "s2s/propagation.hpp"
#include "s2s/ref_select.hpp"

namespace s2s {

/// Original-resolution backward flow letting `target` sample `reference`.
using FlowProvider = std::function<FlowField(std::size_t target, std::size_t reference)>;

/// Fetches every flow the chain needs, maps it onto the canvas, completes the
/// outpainting region and brings it to latent resolution (completion runs at
/// latent resolution unless `at_pixel`).
FlowSet prepare_flow_set(const ReferenceChain& chain, const CanvasSpec& spec,
                         const FlowProvider& provider, const FlowCompleter& completer,
                         bool at_pixel = false);

/// Encodes frames with the stand-in codec and places them on the latent canvas.
std::vector<ChannelGrid> encode_on_canvas(std::span<const ChannelGrid> frames,
                                          const CanvasSpec& spec, float fill = 0.0f);

struct FramePropagation {
  ReferenceChain chain;
  std::vector<ChannelGrid> latents;
  std::vector<BinaryMask> masks;
  FlowSet flows;
  SequenceResult result;
};

/// Frames in, propagated latents out: encode, place, prepare flows, propagate.
FramePropagation propagate_frames(std::span<const ChannelGrid> frames, const CanvasSpec& spec,
                                  const ReferenceChain& chain, const FlowProvider& provider,
                                  const FlowCompleter& completer, const Aligner& aligner,
                                  const Fuser& fuser, bool complete_at_pixel = false);

struct BenchmarkReport {
  std::size_t num_frames = 0;
  std::size_t window = 0;
  std::size_t chain_length = 0;
  std::size_t guided_warps = 0;      // measured
  std::size_t sequential_warps = 0;  // every frame as a reference
  std::size_t all_pairs_warps = 0;   // N (N - 1)
  std::size_t guided_compositions = 0;
  std::map<std::string, double> stage_ms;
  std::size_t peak_bytes = 0;  // live grid bytes at stage boundaries

  bool ordering_holds() const {
    return guided_warps <= sequential_warps && sequential_warps <= all_pairs_warps;
  }
};

nlohmann::json report_to_json(const BenchmarkReport& r, bool with_timings);

/// A failure inside a named pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

enum class PipelineMode { propagate, sample };

struct PipelineSummary {
  ReferenceChain chain;
  BenchmarkReport report;
  nlohmann::json metrics;
  bool complete = false;
};

/// Runs chain selection, flow preparation, propagation, optional sampling,
/// decoding and metrics, writing every artifact under config.output_dir.
/// Stage failures throw StageError after writing an incomplete summary.
PipelineSummary run_pipeline(const PipelineConfig& config, PipelineMode mode);

/// Deterministic per-stage seeds derived from the config seed.
std::uint64_t stage_seed(std::uint64_t seed, std::string_view stage);

struct BenchmarkConfig {
  std::vector<std::size_t> frame_counts = {16, 32, 48, 64};
  std::vector<std::size_t> windows = {2, 3, 4, 5, 6, 7};
  TrajectoryKind trajectory = TrajectoryKind::pan;
  std::uint64_t seed = 1;
  std::size_t crop = 32;
  std::size_t margin = 8;  // outpainting strip on each side
  std::size_t downsample = 2;
  double speed = 2.0;  // pixels per frame for pan / ping-pong
};

/// One report per (N, m) cell. Throws Error if any cell breaks
/// guided <= sequential <= all-pairs.
std::vector<BenchmarkReport> run_benchmark(const BenchmarkConfig& config);

std::string benchmark_csv(const std::vector<BenchmarkReport>& reports);

/// Synthetic scene sized for a benchmark cell.
SceneSpec benchmark_scene(const BenchmarkConfig& config, std::size_t num_frames);

nlohmann::json chain_to_json(const ReferenceChain& chain);

}  // namespace s2s
