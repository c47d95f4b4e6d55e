#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "s2s/flow.hpp"
#include "s2s/grid.hpp"
#include "s2s/scene.hpp"

namespace s2s {

struct CompletionConfig {
  std::string method = "laplacian";
  double tol = 1e-6;
  std::size_t max_iters = 0;
  SweepOrder order = SweepOrder::lexicographic;
  bool at_pixel = false;  // complete on the pixel canvas, then downscale

  CompletionOptions options() const { return {tol, max_iters, order}; }
};

struct ScheduleConfig {
  std::size_t steps = 50;
  double beta_start = 1e-4;
  double beta_end = 0.02;
};

struct SamplerConfig {
  bool enabled = false;
  std::string denoiser = "zero";
  std::size_t window = 25;
  std::size_t stride = 12;
  bool noise_condition = false;
};

/// Either a synthetic scene (generated from the config seed) or S2SG files:
/// frames_dir/frame_0000.s2sg ... and flows_dir/flow_<target>_<ref>.s2sg.
struct InputConfig {
  std::optional<SceneSpec> scene;
  std::filesystem::path frames_dir;
  std::filesystem::path flows_dir;
  std::size_t num_frames = 0;  // 0: count frame files
};

struct PipelineConfig {
  CanvasSpec canvas;
  std::size_t window = 4;
  float fill = 0.0f;
  CompletionConfig completion;
  std::string aligner = "baseline";
  std::string fuser = "baseline";
  ScheduleConfig schedule;
  SamplerConfig sampler;
  std::optional<std::uint64_t> seed;
  InputConfig input;
  std::filesystem::path output_dir = "s2s_out";
  bool record_timings = false;

  /// Throws ConfigError on unresolvable names, window < 1, missing seed or
  /// an invalid canvas.
  void validate() const;
};

PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& c);
PipelineConfig load_config(const std::filesystem::path& path);

nlohmann::json canvas_to_json(const CanvasSpec& c);
CanvasSpec canvas_from_json(const nlohmann::json& j);

}  // namespace s2s
