#include "s2s/propagation.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

#include "s2s/error.hpp"
#include "s2s/flow.hpp"
#include "s2s/kernels.hpp"

namespace s2s {

namespace {

void require_mask_shape(const ChannelGrid& g, const BinaryMask& m, const char* op) {
  if (g.height != m.height || g.width != m.width) {
    throw DimensionError(std::string(op) + ": mask does not match latent dimensions");
  }
}

void require_flow_shape(const FlowField& f, const ChannelGrid& g, const char* what) {
  if (f.height != g.height || f.width != g.width) {
    throw DimensionError(std::string("propagation: ") + what + " flow is " +
                         std::to_string(f.height) + "x" + std::to_string(f.width) +
                         ", latent canvas is " + std::to_string(g.height) + "x" +
                         std::to_string(g.width));
  }
}

// Reference latent with its source mask (1 - outpainting mask) appended as an
// extra channel, so one warp moves both.
ChannelGrid stack_with_source_mask(const ChannelGrid& latent, const BinaryMask& outpaint) {
  ChannelGrid out(latent.channels + 1, latent.height, latent.width);
  std::copy(latent.data.begin(), latent.data.end(), out.data.begin());
  auto mask_plane = out.plane(latent.channels);
  for (std::size_t i = 0; i < mask_plane.size(); ++i) {
    mask_plane[i] = outpaint.data[i] ? 0.0f : 1.0f;
  }
  return out;
}

}  // namespace

void validate_inputs(const PropagationInputs& in) {
  in.chain.validate();
  const std::size_t n = in.chain.num_frames;
  if (in.latents.size() != n || in.masks.size() != n) {
    throw DimensionError("propagation: expected " + std::to_string(n) +
                         " latents and masks, got " + std::to_string(in.latents.size()) + " and " +
                         std::to_string(in.masks.size()));
  }
  const ChannelGrid& first = in.latents.front();
  for (std::size_t i = 0; i < n; ++i) {
    if (!in.latents[i].same_shape(first)) {
      throw DimensionError("propagation: latent " + std::to_string(i) + " has a different shape");
    }
    require_mask_shape(first, in.masks[i], "propagation");
  }
  const std::size_t hops = in.chain.size() - 1;
  if (in.flows.hop_forward.size() != hops || in.flows.hop_backward.size() != hops) {
    throw DimensionError("propagation: expected " + std::to_string(hops) + " hop flows per direction");
  }
  for (std::size_t t = 0; t < hops; ++t) {
    require_flow_shape(in.flows.hop_forward[t], first, "forward hop");
    require_flow_shape(in.flows.hop_backward[t], first, "backward hop");
  }
  if (in.flows.to_past.size() != n || in.flows.to_future.size() != n) {
    throw DimensionError("propagation: expected per-frame nearest-reference flows for every frame");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (in.chain.contains(i)) continue;
    require_flow_shape(in.flows.to_past[i], first, "nearest past");
    require_flow_shape(in.flows.to_future[i], first, "nearest future");
  }
}

PropagationResult propagate_direction(std::size_t frame, const PropagationInputs& in,
                                      Direction direction) {
  const auto& chain = in.chain;
  if (frame >= chain.num_frames) throw ValueError("propagate_direction: frame out of range");
  const ChannelGrid& target = in.latents[frame];
  const std::size_t h = target.height, w = target.width, plane = h * w, c = target.channels;

  PropagationResult res{ChannelGrid(c, h, w, 0.0f), BinaryMask(h, w, 0), IndexGrid(h, w, -1), 0, 0};
  const NearestRefs near = nearest_refs(chain, frame);
  const bool forward = direction == Direction::future;
  const std::size_t start_ref = forward ? near.future : near.past;
  std::size_t pos = chain.position(start_ref);

  auto has_next = [&](std::size_t p) { return forward ? p + 1 < chain.size() : p > 0; };
  auto next_pos = [&](std::size_t p) { return forward ? p + 1 : p - 1; };
  auto hop_from = [&](std::size_t p) -> const FlowField& {
    return forward ? in.flows.hop_forward[p] : in.flows.hop_backward[p - 1];
  };

  AccumulatedFlow acc;
  bool have_acc = false;
  if (start_ref == frame) {
    const BinaryMask& outpaint = in.masks[frame];
    for (std::size_t i = 0; i < plane; ++i) {
      if (outpaint.data[i]) continue;
      res.coverage.data[i] = 1;
      res.provenance.data[i] = static_cast<std::int32_t>(frame);
      for (std::size_t ch = 0; ch < c; ++ch) res.latent.data[ch * plane + i] = target.data[ch * plane + i];
    }
    if (!has_next(pos)) return res;
    // F_{i -> i} is zero, so the first hop is already the accumulated flow.
    acc = AccumulatedFlow{frame, chain.indices[next_pos(pos)], hop_from(pos), 1};
    pos = next_pos(pos);
    have_acc = true;
  } else {
    acc = AccumulatedFlow{frame, start_ref,
                          forward ? in.flows.to_future[frame] : in.flows.to_past[frame], 1};
    have_acc = true;
  }

  while (have_acc) {
    const std::size_t ref = chain.indices[pos];
    const ChannelGrid stacked = stack_with_source_mask(in.latents[ref], in.masks[ref]);
    const WarpResult pulled = backward_warp(stacked, acc.flow);
    ++res.warp_count;
    const auto mask_plane = pulled.image.plane(c);
    for (std::size_t i = 0; i < plane; ++i) {
      if (res.coverage.data[i] || !pulled.valid.data[i]) continue;
      if (!(mask_plane[i] >= in.coverage_threshold)) continue;
      res.coverage.data[i] = 1;
      res.provenance.data[i] = static_cast<std::int32_t>(ref);
      for (std::size_t ch = 0; ch < c; ++ch) {
        res.latent.data[ch * plane + i] = pulled.image.data[ch * plane + i];
      }
    }
    if (!has_next(pos)) break;
    acc = compose_accumulated(acc, hop_from(pos), chain.indices[next_pos(pos)]);
    ++res.compose_count;
    pos = next_pos(pos);
  }
  return res;
}

ChannelGrid align_baseline(const ChannelGrid& z_orig, const ChannelGrid& z_prop,
                           const BinaryMask& m_outpaint, const BinaryMask& m_prop) {
  if (!z_orig.same_shape(z_prop)) throw DimensionError("align_baseline: latent shapes differ");
  require_mask_shape(z_orig, m_outpaint, "align_baseline");
  require_mask_shape(z_orig, m_prop, "align_baseline");
  ChannelGrid out = z_orig;
  const std::size_t plane = z_orig.plane_size();
  for (std::size_t i = 0; i < plane; ++i) {
    if (!(m_outpaint.data[i] && m_prop.data[i])) continue;
    for (std::size_t ch = 0; ch < z_orig.channels; ++ch) {
      out.data[ch * plane + i] = z_prop.data[ch * plane + i];
    }
  }
  return out;
}

ChannelGrid fuse_baseline(const ChannelGrid& forward, const ChannelGrid& backward,
                          const BinaryMask& cov_f, const BinaryMask& cov_b, std::size_t dist_f,
                          std::size_t dist_b) {
  if (!forward.same_shape(backward)) throw DimensionError("fuse_baseline: latent shapes differ");
  require_mask_shape(forward, cov_f, "fuse_baseline");
  require_mask_shape(forward, cov_b, "fuse_baseline");
  const double total = static_cast<double>(dist_f + dist_b);
  const double w_b = total > 0.0 ? static_cast<double>(dist_f) / total : 0.5;
  ChannelGrid out = forward;
  const std::size_t plane = forward.plane_size();
  for (std::size_t i = 0; i < plane; ++i) {
    if (!cov_b.data[i]) continue;
    for (std::size_t ch = 0; ch < forward.channels; ++ch) {
      const std::size_t k = ch * plane + i;
      if (cov_f.data[i]) {
        // f + w_b (b - f) keeps equal inputs exact.
        out.data[k] = static_cast<float>(forward.data[k] +
                                         w_b * (static_cast<double>(backward.data[k]) - forward.data[k]));
      } else {
        out.data[k] = backward.data[k];
      }
    }
  }
  return out;
}

PropagationResult propagate_frame(std::size_t frame, const PropagationInputs& in,
                                  const Aligner& aligner, const Fuser& fuser) {
  const NearestRefs near = nearest_refs(in.chain, frame);
  PropagationResult fw = propagate_direction(frame, in, Direction::future);
  PropagationResult bw = propagate_direction(frame, in, Direction::past);
  const ChannelGrid& z_orig = in.latents[frame];
  const BinaryMask& outpaint = in.masks[frame];
  const ChannelGrid fw_aligned = aligner.align(z_orig, fw.latent, outpaint, fw.coverage);
  const ChannelGrid bw_aligned = aligner.align(z_orig, bw.latent, outpaint, bw.coverage);

  PropagationResult out;
  out.latent = fuser.fuse(fw_aligned, bw_aligned, fw.coverage, bw.coverage, near.future - frame,
                          frame - near.past);
  const std::size_t plane = z_orig.plane_size();
  out.coverage = BinaryMask(z_orig.height, z_orig.width, 0);
  out.provenance = IndexGrid(z_orig.height, z_orig.width, -1);
  const auto target = static_cast<long>(frame);
  for (std::size_t i = 0; i < plane; ++i) {
    const std::int32_t pf = fw.provenance.data[i];
    const std::int32_t pb = bw.provenance.data[i];
    if (pf < 0 && pb < 0) continue;
    out.coverage.data[i] = 1;
    if (pf < 0) {
      out.provenance.data[i] = pb;
    } else if (pb < 0) {
      out.provenance.data[i] = pf;
    } else {
      // Temporally nearest wins; ties go to the past side.
      out.provenance.data[i] = std::labs(pf - target) < std::labs(target - pb) ? pf : pb;
    }
  }
  out.warp_count = fw.warp_count + bw.warp_count;
  out.compose_count = fw.compose_count + bw.compose_count;
  return out;
}

WarpCounts analytic_warp_counts(const ReferenceChain& chain) {
  chain.validate();
  const std::size_t n = chain.num_frames, l = chain.size();
  // Every frame pulls once from each chain member other than itself.
  WarpCounts counts;
  counts.guided = n * l - l;
  counts.sequential = n * (n - 1);
  counts.all_pairs = n * (n - 1);
  return counts;
}

SequenceResult propagate_sequence(const PropagationInputs& in, const Aligner& aligner,
                                  const Fuser& fuser) {
  validate_inputs(in);
  const std::size_t n = in.chain.num_frames;
  SequenceResult out;
  out.frames.resize(n);

  // Exceptions must not escape an OpenMP region; keep the first per index.
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      out.frames[static_cast<std::size_t>(i)] =
          propagate_frame(static_cast<std::size_t>(i), in, aligner, fuser);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& f : out.frames) {
    out.total_warps += f.warp_count;
    out.total_compositions += f.compose_count;
  }
  out.analytic = analytic_warp_counts(in.chain);
  return out;
}

}  // namespace s2s
