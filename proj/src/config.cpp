#include "s2s/config.hpp"

#include <fstream>
#include <set>

#include "s2s/error.hpp"

namespace s2s {

using nlohmann::json;

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

const std::set<std::string>& known_blocks() {
  static const std::set<std::string> keys = {"canvas",  "window",  "fill",   "completion",
                                             "aligner", "fuser",   "schedule", "sampler",
                                             "seed",    "input",   "output_dir", "record_timings"};
  return keys;
}

}  // namespace

json canvas_to_json(const CanvasSpec& c) {
  json j;
  j["orig_h"] = c.orig_h;
  j["orig_w"] = c.orig_w;
  j["canvas_h"] = c.canvas_h;
  j["canvas_w"] = c.canvas_w;
  j["offset_y"] = c.offset_y;
  j["offset_x"] = c.offset_x;
  j["downsample"] = c.downsample;
  return j;
}

CanvasSpec canvas_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("canvas must be an object");
  CanvasSpec c;
  for (const char* key : {"orig_h", "orig_w", "canvas_h", "canvas_w"}) {
    if (!j.contains(key)) throw ConfigError(std::string("canvas.") + key + " is required");
  }
  read_opt(j, "orig_h", c.orig_h);
  read_opt(j, "orig_w", c.orig_w);
  read_opt(j, "canvas_h", c.canvas_h);
  read_opt(j, "canvas_w", c.canvas_w);
  read_opt(j, "offset_y", c.offset_y);
  read_opt(j, "offset_x", c.offset_x);
  read_opt(j, "downsample", c.downsample);
  return c;
}

PipelineConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known_blocks().count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  PipelineConfig c;
  if (!j.contains("canvas")) throw ConfigError("config needs a 'canvas' block");
  c.canvas = canvas_from_json(j.at("canvas"));
  read_opt(j, "window", c.window);
  read_opt(j, "fill", c.fill);
  read_opt(j, "aligner", c.aligner);
  read_opt(j, "fuser", c.fuser);
  read_opt(j, "record_timings", c.record_timings);
  if (j.contains("seed")) {
    std::uint64_t seed = 0;
    read_opt(j, "seed", seed);
    c.seed = seed;
  }
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("completion")) {
    const json& cj = j.at("completion");
    read_opt(cj, "method", c.completion.method);
    read_opt(cj, "tol", c.completion.tol);
    read_opt(cj, "max_iters", c.completion.max_iters);
    read_opt(cj, "at_pixel", c.completion.at_pixel);
    if (cj.contains("order")) {
      const std::string order = cj.at("order").get<std::string>();
      if (order == "lexicographic") {
        c.completion.order = SweepOrder::lexicographic;
      } else if (order == "red_black") {
        c.completion.order = SweepOrder::red_black;
      } else {
        throw ConfigError("completion.order must be 'lexicographic' or 'red_black'");
      }
    }
  }
  if (j.contains("schedule")) {
    const json& sj = j.at("schedule");
    read_opt(sj, "T", c.schedule.steps);
    read_opt(sj, "beta_start", c.schedule.beta_start);
    read_opt(sj, "beta_end", c.schedule.beta_end);
  }
  if (j.contains("sampler")) {
    const json& sj = j.at("sampler");
    read_opt(sj, "enabled", c.sampler.enabled);
    read_opt(sj, "denoiser", c.sampler.denoiser);
    read_opt(sj, "window", c.sampler.window);
    read_opt(sj, "stride", c.sampler.stride);
    read_opt(sj, "noise_condition", c.sampler.noise_condition);
  }
  if (j.contains("input")) {
    const json& ij = j.at("input");
    if (ij.contains("scene")) {
      const json& s = ij.at("scene");
      SceneSpec scene;
      read_opt(s, "world_h", scene.world_h);
      read_opt(s, "world_w", scene.world_w);
      read_opt(s, "channels", scene.channels);
      read_opt(s, "num_frames", scene.num_frames);
      std::string kind = "pan";
      read_opt(s, "trajectory", kind);
      try {
        scene.trajectory.kind = parse_trajectory(kind);
      } catch (const ValueError& e) {
        throw ConfigError(e.what());
      }
      read_opt(s, "dx", scene.trajectory.dx);
      read_opt(s, "dy", scene.trajectory.dy);
      read_opt(s, "start_x", scene.trajectory.start_x);
      read_opt(s, "start_y", scene.trajectory.start_y);
      read_opt(s, "leg", scene.trajectory.leg);
      c.input.scene = scene;
    }
    if (ij.contains("frames_dir")) c.input.frames_dir = ij.at("frames_dir").get<std::string>();
    if (ij.contains("flows_dir")) c.input.flows_dir = ij.at("flows_dir").get<std::string>();
    read_opt(ij, "num_frames", c.input.num_frames);
  }
  return c;
}

json config_to_json(const PipelineConfig& c) {
  json j;
  j["canvas"] = canvas_to_json(c.canvas);
  j["window"] = c.window;
  j["fill"] = c.fill;
  j["completion"] = {{"method", c.completion.method},
                     {"tol", c.completion.tol},
                     {"max_iters", c.completion.max_iters},
                     {"order", c.completion.order == SweepOrder::red_black ? "red_black" : "lexicographic"},
                     {"at_pixel", c.completion.at_pixel}};
  j["aligner"] = c.aligner;
  j["fuser"] = c.fuser;
  j["schedule"] = {{"T", c.schedule.steps},
                   {"beta_start", c.schedule.beta_start},
                   {"beta_end", c.schedule.beta_end}};
  j["sampler"] = {{"enabled", c.sampler.enabled},
                  {"denoiser", c.sampler.denoiser},
                  {"window", c.sampler.window},
                  {"stride", c.sampler.stride},
                  {"noise_condition", c.sampler.noise_condition}};
  if (c.seed) j["seed"] = *c.seed;
  json input = json::object();
  if (c.input.scene) {
    const SceneSpec& s = *c.input.scene;
    input["scene"] = {{"world_h", s.world_h},
                      {"world_w", s.world_w},
                      {"channels", s.channels},
                      {"num_frames", s.num_frames},
                      {"trajectory", to_string(s.trajectory.kind)},
                      {"dx", s.trajectory.dx},
                      {"dy", s.trajectory.dy},
                      {"start_x", s.trajectory.start_x},
                      {"start_y", s.trajectory.start_y},
                      {"leg", s.trajectory.leg}};
  }
  if (!c.input.frames_dir.empty()) input["frames_dir"] = c.input.frames_dir.string();
  if (!c.input.flows_dir.empty()) input["flows_dir"] = c.input.flows_dir.string();
  if (c.input.num_frames) input["num_frames"] = c.input.num_frames;
  j["input"] = input;
  j["output_dir"] = c.output_dir.string();
  j["record_timings"] = c.record_timings;
  return j;
}

void PipelineConfig::validate() const {
  try {
    canvas.validate();
  } catch (const ValueError& e) {
    throw ConfigError(std::string("canvas: ") + e.what());
  }
  if (window < 1) throw ConfigError("window must be >= 1");
  if (!seed) throw ConfigError("seed is required");
  if (!CompleterRegistry::instance().contains(completion.method)) {
    throw ConfigError("unknown completion method '" + completion.method + "'");
  }
  if (!(completion.tol > 0.0)) throw ConfigError("completion.tol must be > 0");
  if (aligner != "baseline") throw ConfigError("unknown aligner '" + aligner + "'");
  if (fuser != "baseline") throw ConfigError("unknown fuser '" + fuser + "'");
  if (sampler.enabled) {
    if (sampler.window < 1 || sampler.stride < 1 || sampler.stride > sampler.window) {
      throw ConfigError("sampler requires 1 <= stride <= window");
    }
    if (schedule.steps < 1 || !(schedule.beta_start > 0.0 && schedule.beta_start <= schedule.beta_end &&
                                schedule.beta_end < 1.0)) {
      throw ConfigError("schedule requires T >= 1 and 0 < beta_start <= beta_end < 1");
    }
    const std::string& d = sampler.denoiser;
    if (d != "zero" && d != "oracle" && d.rfind("constant:", 0) != 0) {
      throw ConfigError("unknown denoiser '" + d + "'");
    }
    if (d == "oracle" && !input.scene) {
      throw ConfigError("denoiser 'oracle' needs a synthetic scene for ground truth");
    }
  }
  if (!input.scene && input.frames_dir.empty()) {
    throw ConfigError("input needs either a 'scene' block or 'frames_dir'");
  }
  if (input.scene && input.scene->num_frames < 1) throw ConfigError("scene.num_frames must be >= 1");
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace s2s
