#include "s2s/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>

#include "s2s/codec.hpp"
#include "s2s/error.hpp"
#include "pipeline_internal.hpp"
#include "s2s/grid_io.hpp"
#include "s2s/metrics.hpp"
#include "s2s/scene.hpp"

namespace s2s {

using nlohmann::json;
using namespace internal;

namespace {

std::string numbered(const char* stem, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04zu%s", stem, i, ext);
  return buf;
}

std::string flow_file_name(std::size_t target, std::size_t reference) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "flow_%04zu_%04zu.s2sg", target, reference);
  return buf;
}

json finite_or_string(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

std::uint64_t stage_seed(std::uint64_t seed, std::string_view stage) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
  for (char c : stage) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return CounterRng(seed).split(h).bits(0);
}

json chain_to_json(const ReferenceChain& chain) { return json(chain.indices); }

FlowSet prepare_flow_set(const ReferenceChain& chain, const CanvasSpec& spec,
                         const FlowProvider& provider, const FlowCompleter& completer,
                         bool at_pixel) {
  chain.validate();
  spec.validate();
  const std::size_t n = chain.num_frames, l = chain.size(), s = spec.downsample;
  const BinaryMask pixel_missing = make_outpaint_mask(spec);
  const BinaryMask latent_missing = downscale_mask(pixel_missing, s);

  auto process = [&](const FlowField& raw) {
    const FlowField on_canvas = map_flow_to_canvas(raw, spec);
    if (at_pixel) return downscale_flow(completer.complete(on_canvas, pixel_missing), s);
    return completer.complete(downscale_flow(on_canvas, s), latent_missing);
  };

  FlowSet out;
  out.to_past.resize(n);
  out.to_future.resize(n);
  out.hop_forward.resize(l - 1);
  out.hop_backward.resize(l - 1);

  struct Task {
    FlowField* slot;
    std::size_t target, reference;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < n; ++i) {
    if (chain.contains(i)) continue;
    const NearestRefs near = nearest_refs(chain, i);
    tasks.push_back({&out.to_past[i], i, near.past});
    tasks.push_back({&out.to_future[i], i, near.future});
  }
  for (std::size_t t = 0; t + 1 < l; ++t) {
    tasks.push_back({&out.hop_forward[t], chain.indices[t], chain.indices[t + 1]});
    tasks.push_back({&out.hop_backward[t], chain.indices[t + 1], chain.indices[t]});
  }
  parallel_for_each(tasks.size(), [&](std::size_t k) {
    *tasks[k].slot = process(provider(tasks[k].target, tasks[k].reference));
  });
  return out;
}

std::vector<ChannelGrid> encode_on_canvas(std::span<const ChannelGrid> frames,
                                          const CanvasSpec& spec, float fill) {
  const CanvasSpec latent = spec.latent();
  std::vector<ChannelGrid> out;
  out.reserve(frames.size());
  for (const auto& f : frames) {
    out.push_back(place_on_canvas(stand_in_encode(f, spec.downsample), latent, fill));
  }
  return out;
}

FramePropagation propagate_frames(std::span<const ChannelGrid> frames, const CanvasSpec& spec,
                                  const ReferenceChain& chain, const FlowProvider& provider,
                                  const FlowCompleter& completer, const Aligner& aligner,
                                  const Fuser& fuser, bool complete_at_pixel) {
  FramePropagation fp;
  fp.chain = chain;
  fp.latents = encode_on_canvas(frames, spec);
  fp.masks.assign(frames.size(), make_outpaint_mask(spec.latent()));
  fp.flows = prepare_flow_set(chain, spec, provider, completer, complete_at_pixel);
  PropagationInputs in{fp.chain, fp.latents, fp.masks, fp.flows};
  fp.result = propagate_sequence(in, aligner, fuser);
  return fp;
}

PipelineSummary run_pipeline(const PipelineConfig& requested, PipelineMode mode) {
  PipelineConfig config = requested;
  if (mode == PipelineMode::sample) config.sampler.enabled = true;
  config.validate();
  const std::uint64_t seed = *config.seed;
  const std::filesystem::path out_dir = config.output_dir;
  std::filesystem::create_directories(out_dir);

  PipelineSummary summary;
  StageClock clock;
  std::size_t peak = 0;
  auto note_live = [&](std::size_t bytes) { peak = std::max(peak, bytes); };

  auto write_summary = [&](bool complete, const std::string& failed_stage, const std::string& error) {
    json j;
    j["complete"] = complete;
    j["mode"] = mode == PipelineMode::sample ? "sample" : "propagate";
    if (!complete) {
      j["failed_stage"] = failed_stage;
      j["error"] = error;
    }
    j["config"] = config_to_json(config);
    j["config"].erase("output_dir");
    j["chain"] = chain_to_json(summary.chain);
    summary.report.stage_ms = clock.ms();
    j["report"] = report_to_json(summary.report, config.record_timings);
    j["metrics"] = summary.metrics;
    write_json(out_dir / "summary.json", j);
  };

  auto stage = [&](const std::string& name, auto&& fn) {
    try {
      return clock.run(name, fn);
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      write_summary(false, name, e.what());
      throw StageError(name, e.what());
    }
  };

  // load
  std::optional<SyntheticScene> scene;
  std::vector<ChannelGrid> frames = stage("load", [&] {
    std::vector<ChannelGrid> loaded;
    if (config.input.scene) {
      SceneSpec spec = *config.input.scene;
      spec.canvas = config.canvas;
      spec.seed = stage_seed(seed, "scene");
      scene = generate_scene(spec);
      loaded = scene->frames();
    } else {
      std::size_t n = config.input.num_frames;
      if (n == 0) {
        while (std::filesystem::exists(config.input.frames_dir / numbered("frame", n, ".s2sg"))) ++n;
      }
      if (n == 0) throw ValueError("no frame files in " + config.input.frames_dir.string());
      for (std::size_t i = 0; i < n; ++i) {
        loaded.push_back(read_channel_grid(config.input.frames_dir / numbered("frame", i, ".s2sg")));
      }
    }
    return loaded;
  });
  const std::size_t n = frames.size();
  note_live(bytes_of(frames));

  summary.chain = stage("chain", [&] { return build_reference_chain(frames, config.window); });
  write_json(out_dir / "chain.json", chain_to_json(summary.chain));

  const CanvasSpec& spec = config.canvas;
  const std::size_t s = spec.downsample;
  FlowProvider provider;
  if (scene) {
    provider = [&](std::size_t t, std::size_t r) { return scene->flow(t, r); };
  } else {
    const auto dir = config.input.flows_dir.empty() ? config.input.frames_dir : config.input.flows_dir;
    provider = [dir](std::size_t t, std::size_t r) { return read_flow(dir / flow_file_name(t, r)); };
  }
  const auto completer =
      CompleterRegistry::instance().create(config.completion.method, config.completion.options());
  FlowSet flows = stage("flows", [&] {
    return prepare_flow_set(summary.chain, spec, provider, *completer, config.completion.at_pixel);
  });
  note_live(bytes_of(frames) + bytes_of(flows));

  std::vector<ChannelGrid> latents = encode_on_canvas(frames, spec, config.fill);
  std::vector<BinaryMask> masks(n, make_outpaint_mask(spec.latent()));
  const BaselineAligner aligner;
  const BaselineFuser fuser;
  SequenceResult seq = stage("propagate", [&] {
    PropagationInputs in{summary.chain, latents, masks, flows};
    return propagate_sequence(in, aligner, fuser);
  });
  note_live(bytes_of(frames) + bytes_of(flows) + bytes_of(latents) + bytes_of(masks) +
            bytes_of(seq.frames));

  summary.report.num_frames = n;
  summary.report.window = config.window;
  summary.report.chain_length = summary.chain.size();
  summary.report.guided_warps = seq.total_warps;
  summary.report.guided_compositions = seq.total_compositions;
  summary.report.sequential_warps = seq.analytic.sequential;
  summary.report.all_pairs_warps = seq.analytic.all_pairs;

  std::vector<ChannelGrid> propagated;
  propagated.reserve(n);
  for (const auto& f : seq.frames) propagated.push_back(f.latent);

  std::optional<LatentSequence> sampled;
  std::optional<LatentSequence> truth_latents;
  if (scene) {
    truth_latents.emplace();
    for (std::size_t i = 0; i < n; ++i) {
      truth_latents->push_back(stand_in_encode(scene->expanded_truth(i), s));
    }
  }
  if (mode == PipelineMode::sample) {
    sampled = stage("sample", [&] {
      const NoiseSchedule schedule =
          make_schedule(config.schedule.steps, config.schedule.beta_start, config.schedule.beta_end);
      const auto denoiser = make_denoiser(config.sampler.denoiser, schedule,
                                          truth_latents ? &*truth_latents : nullptr);
      SamplerOptions options;
      options.plan = plan_windows(n, config.sampler.window, config.sampler.stride);
      options.noise_condition = config.sampler.noise_condition;
      return reverse_sample(*denoiser, propagated, schedule, stage_seed(seed, "sample"), options);
    });
    note_live(peak + bytes_of(*sampled));
  }

  stage("metrics", [&] {
    json m;
    m["frames"] = json::array();
    double source_max_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = seq.frames[i];
      const std::size_t plane = r.latent.plane_size();
      for (std::size_t c = 0; c < r.latent.channels; ++c) {
        for (std::size_t k = 0; k < plane; ++k) {
          if (masks[i].data[k]) continue;
          source_max_err = std::max(
              source_max_err,
              std::abs(static_cast<double>(r.latent.data[c * plane + k]) - latents[i].data[c * plane + k]));
        }
      }
    }
    m["source_max_abs_error"] = source_max_err;
    if (!scene) {
      summary.metrics = m;
      return;
    }
    const CanvasSpec lat = spec.latent();
    double sq_sum = 0.0, max_err = 0.0;
    std::size_t sq_n = 0, covered_total = 0, reachable_total = 0, covered_reachable_total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = seq.frames[i];
      const ChannelGrid& truth = (*truth_latents)[i];
      std::size_t covered = 0, reachable = 0, covered_reachable = 0;
      double frame_sq = 0.0;
      for (std::size_t y = 0; y < lat.canvas_h; ++y) {
        for (std::size_t x = 0; x < lat.canvas_w; ++x) {
          const std::size_t k = y * lat.canvas_w + x;
          if (!masks[i].data[k]) continue;
          bool can_reach = false;
          for (std::size_t ref : summary.chain.indices) {
            if (scene->visible_in(i, y, x, ref, s)) {
              can_reach = true;
              break;
            }
          }
          reachable += can_reach;
          if (!r.coverage.data[k]) continue;
          ++covered;
          covered_reachable += can_reach;
          for (std::size_t c = 0; c < r.latent.channels; ++c) {
            const double d = static_cast<double>(r.latent.data[c * lat.canvas_h * lat.canvas_w + k]) -
                             truth.data[c * lat.canvas_h * lat.canvas_w + k];
            frame_sq += d * d;
            max_err = std::max(max_err, std::abs(d));
            ++sq_n;
          }
        }
      }
      sq_sum += frame_sq;
      covered_total += covered;
      reachable_total += reachable;
      covered_reachable_total += covered_reachable;
      json fm;
      fm["frame"] = i;
      fm["covered_outpaint_cells"] = covered;
      fm["reachable_outpaint_cells"] = reachable;
      fm["decoded_psnr"] = finite_or_string(psnr(stand_in_decode(r.latent, s), scene->expanded_truth(i)));
      m["frames"].push_back(fm);
    }
    const double mse = sq_n ? sq_sum / static_cast<double>(sq_n) : 0.0;
    m["covered_outpaint_cells"] = covered_total;
    m["reachable_outpaint_cells"] = reachable_total;
    m["reachable_coverage"] =
        reachable_total ? static_cast<double>(covered_reachable_total) / static_cast<double>(reachable_total) : 1.0;
    m["covered_max_abs_error"] = max_err;
    m["covered_psnr"] = finite_or_string(sq_n == 0 ? kPsnrIdentical
                                                   : (mse == 0.0 ? kPsnrIdentical : 10.0 * std::log10(1.0 / mse)));
    if (sampled) {
      double ssim_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        ssim_sum += ssim_full(stand_in_decode((*sampled)[i], s), scene->expanded_truth(i));
      }
      m["sampled_mean_ssim"] = ssim_sum / static_cast<double>(n);
    }
    summary.metrics = m;
  });

  stage("write", [&] {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& r = seq.frames[i];
      write_grid(out_dir / numbered("latent", i, ".s2sg"), r.latent);
      write_grid(out_dir / numbered("coverage", i, ".s2sg"), r.coverage);
      write_grid(out_dir / numbered("decoded", i, ".s2sg"), stand_in_decode(r.latent, s));
      json side;
      side["frame"] = i;
      side["warp_count"] = r.warp_count;
      side["compose_count"] = r.compose_count;
      side["chain"] = chain_to_json(summary.chain);
      side["height"] = r.provenance.height;
      side["width"] = r.provenance.width;
      side["provenance"] = r.provenance.data;
      write_json(out_dir / numbered("propagation", i, ".json"), side);
      if (sampled) {
        write_grid(out_dir / numbered("sampled", i, ".s2sg"), (*sampled)[i]);
        write_grid(out_dir / numbered("sampled_decoded", i, ".s2sg"), stand_in_decode((*sampled)[i], s));
      }
    }
  });

  summary.report.peak_bytes = peak;
  summary.complete = true;
  write_summary(true, "", "");
  return summary;
}

}  // namespace s2s
