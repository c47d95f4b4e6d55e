#include "s2s/diffusion.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>

#include "s2s/error.hpp"

namespace s2s {

namespace {

void require_same_shapes(std::span<const ChannelGrid> a, std::span<const ChannelGrid> b,
                         const char* op) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(op) + ": sequence lengths differ (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  for (std::size_t f = 0; f < a.size(); ++f) {
    if (!a[f].same_shape(b[f])) {
      throw DimensionError(std::string(op) + ": frame " + std::to_string(f) + " shapes differ");
    }
  }
}

void require_timestep(std::size_t t, const NoiseSchedule& s, const char* op) {
  if (t < 1 || t > s.steps()) {
    throw ValueError(std::string(op) + ": timestep " + std::to_string(t) + " outside [1, " +
                     std::to_string(s.steps()) + "]");
  }
}

LatentSequence zeros_like(std::span<const ChannelGrid> shape) {
  LatentSequence out;
  out.reserve(shape.size());
  for (const auto& g : shape) out.emplace_back(g.channels, g.height, g.width, 0.0f);
  return out;
}

}  // namespace

void NoiseSchedule::validate() const {
  if (beta.empty()) throw ValueError("noise schedule has no steps");
  if (alpha.size() != beta.size() || alpha_bar.size() != beta.size()) {
    throw ValueError("noise schedule tables have inconsistent lengths");
  }
  double prev = 1.0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (!(beta[i] > 0.0 && beta[i] < 1.0)) throw ValueError("noise schedule: beta outside (0, 1)");
    if (!(alpha_bar[i] < prev)) throw ValueError("noise schedule: alpha_bar not strictly decreasing");
    prev = alpha_bar[i];
  }
}

NoiseSchedule make_schedule(std::size_t steps, double beta_start, double beta_end) {
  if (steps == 0) throw ValueError("make_schedule: T must be >= 1");
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
    throw ValueError("make_schedule: require 0 < beta_start <= beta_end < 1");
  }
  NoiseSchedule s;
  s.beta_start = beta_start;
  s.beta_end = beta_end;
  s.beta.resize(steps);
  s.alpha.resize(steps);
  s.alpha_bar.resize(steps);
  double running = 1.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double frac = steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
    s.beta[i] = beta_start + (beta_end - beta_start) * frac;
    s.alpha[i] = 1.0 - s.beta[i];
    running *= s.alpha[i];
    s.alpha_bar[i] = running;
  }
  s.validate();
  return s;
}

LatentSequence forward_noise(std::span<const ChannelGrid> z0, std::size_t timestep,
                             std::span<const ChannelGrid> noise, const NoiseSchedule& schedule) {
  require_same_shapes(z0, noise, "forward_noise");
  require_timestep(timestep, schedule, "forward_noise");
  const double ab = schedule.alpha_bar_at(timestep);
  const double signal = std::sqrt(ab), sigma = std::sqrt(1.0 - ab);
  LatentSequence out = zeros_like(z0);
  for (std::size_t f = 0; f < z0.size(); ++f) {
    for (std::size_t k = 0; k < z0[f].data.size(); ++k) {
      out[f].data[k] = static_cast<float>(signal * z0[f].data[k] + sigma * noise[f].data[k]);
    }
  }
  return out;
}

LatentSequence ZeroDenoiser::predict(std::span<const ChannelGrid> noisy,
                                     std::span<const ChannelGrid>, std::size_t,
                                     std::size_t) const {
  return zeros_like(noisy);
}

LatentSequence ConstantDenoiser::predict(std::span<const ChannelGrid> noisy,
                                         std::span<const ChannelGrid>, std::size_t,
                                         std::size_t) const {
  LatentSequence out;
  for (const auto& g : noisy) out.emplace_back(g.channels, g.height, g.width, value_);
  return out;
}

LatentSequence OracleDenoiser::predict(std::span<const ChannelGrid> noisy,
                                       std::span<const ChannelGrid>, std::size_t timestep,
                                       std::size_t first_frame) const {
  require_timestep(timestep, schedule_, "OracleDenoiser");
  if (first_frame + noisy.size() > clean_.size()) {
    throw DimensionError("OracleDenoiser: frames beyond the clean sequence");
  }
  const double ab = schedule_.alpha_bar_at(timestep);
  const double signal = std::sqrt(ab), sigma = std::sqrt(1.0 - ab);
  LatentSequence out = zeros_like(noisy);
  for (std::size_t f = 0; f < noisy.size(); ++f) {
    const ChannelGrid& z0 = clean_[first_frame + f];
    if (!z0.same_shape(noisy[f])) throw DimensionError("OracleDenoiser: shape mismatch");
    for (std::size_t k = 0; k < z0.data.size(); ++k) {
      out[f].data[k] = static_cast<float>((noisy[f].data[k] - signal * z0.data[k]) / sigma);
    }
  }
  return out;
}

std::unique_ptr<Denoiser> make_denoiser(const std::string& name, const NoiseSchedule& schedule,
                                        const LatentSequence* clean) {
  if (name == "zero") return std::make_unique<ZeroDenoiser>();
  if (name.rfind("constant:", 0) == 0) {
    const std::string arg = name.substr(9);
    char* end = nullptr;
    const double value = std::strtod(arg.c_str(), &end);
    if (arg.empty() || end != arg.c_str() + arg.size() || !std::isfinite(value)) {
      throw ConfigError("denoiser '" + name + "': expected constant:<number>");
    }
    return std::make_unique<ConstantDenoiser>(static_cast<float>(value));
  }
  if (name == "oracle") {
    if (!clean) throw ConfigError("denoiser 'oracle' needs ground-truth latents");
    return std::make_unique<OracleDenoiser>(*clean, schedule);
  }
  throw ConfigError("unknown denoiser '" + name + "'");
}

double training_loss(const Denoiser& denoiser, std::span<const ChannelGrid> z0,
                     std::span<const ChannelGrid> condition, std::size_t timestep,
                     std::span<const ChannelGrid> noise, const NoiseSchedule& schedule,
                     std::span<const ChannelGrid> condition_noise) {
  const LatentSequence noisy = forward_noise(z0, timestep, noise, schedule);
  LatentSequence noisy_condition;
  std::span<const ChannelGrid> cond = condition;
  if (!condition_noise.empty()) {
    noisy_condition = forward_noise(condition, timestep, condition_noise, schedule);
    cond = noisy_condition;
  }
  const LatentSequence pred = denoiser.predict(noisy, cond, timestep, 0);
  require_same_shapes(noise, pred, "training_loss");
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < noise.size(); ++f) {
    for (std::size_t k = 0; k < noise[f].data.size(); ++k) {
      const double d = static_cast<double>(noise[f].data[k]) - pred[f].data[k];
      total += d * d;
    }
    count += noise[f].data.size();
  }
  if (count == 0) throw ValueError("training_loss: empty sequence");
  return total / static_cast<double>(count);
}

std::vector<std::size_t> WindowPlan::membership() const {
  std::vector<std::size_t> counts(num_frames, 0);
  for (const auto& [s, e] : windows) {
    for (std::size_t f = s; f < e; ++f) ++counts[f];
  }
  return counts;
}

WindowPlan plan_windows(std::size_t num_frames, std::size_t window, std::size_t stride) {
  if (window < 1) throw ValueError("plan_windows: window length must be >= 1");
  if (stride < 1) throw ValueError("plan_windows: stride must be >= 1");
  if (stride > window) throw ValueError("plan_windows: stride larger than window leaves gaps");
  if (num_frames == 0) throw ValueError("plan_windows: no frames");
  WindowPlan plan{{}, window, stride, num_frames};
  for (std::size_t start = 0;; start += stride) {
    const std::size_t end = std::min(start + window, num_frames);
    plan.windows.emplace_back(start, end);
    if (end == num_frames) break;
  }
  return plan;
}

LatentSequence windowed_epsilon(const Denoiser& denoiser, std::span<const ChannelGrid> noisy,
                                std::span<const ChannelGrid> condition, std::size_t timestep,
                                const WindowPlan& plan) {
  if (plan.num_frames != noisy.size()) {
    throw DimensionError("windowed_epsilon: plan covers " + std::to_string(plan.num_frames) +
                         " frames, sequence has " + std::to_string(noisy.size()));
  }
  if (!condition.empty() && condition.size() != noisy.size()) {
    throw DimensionError("windowed_epsilon: condition length differs from the sequence");
  }
  const std::vector<std::size_t> counts = plan.membership();
  for (std::size_t f = 0; f < counts.size(); ++f) {
    if (counts[f] == 0) throw ValueError("windowed_epsilon: frame " + std::to_string(f) + " is in no window");
  }

  const std::size_t nw = plan.windows.size();
  std::vector<LatentSequence> preds(nw);
  std::vector<std::exception_ptr> errors(nw);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k_s = 0; k_s < static_cast<std::ptrdiff_t>(nw); ++k_s) {
    const auto k = static_cast<std::size_t>(k_s);
    const auto [s, e] = plan.windows[k];
    try {
      auto cond = condition.empty() ? condition : condition.subspan(s, e - s);
      preds[k] = denoiser.predict(noisy.subspan(s, e - s), cond, timestep, s);
      require_same_shapes(noisy.subspan(s, e - s), preds[k], "windowed_epsilon");
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  LatentSequence out = zeros_like(noisy);
  for (std::size_t f = 0; f < noisy.size(); ++f) {
    std::vector<double> acc(noisy[f].data.size(), 0.0);
    for (std::size_t k = 0; k < nw; ++k) {
      const auto [s, e] = plan.windows[k];
      if (f < s || f >= e) continue;
      const auto& p = preds[k][f - s].data;
      for (std::size_t q = 0; q < acc.size(); ++q) acc[q] += p[q];
    }
    const double inv = static_cast<double>(counts[f]);
    for (std::size_t q = 0; q < acc.size(); ++q) out[f].data[q] = static_cast<float>(acc[q] / inv);
  }
  return out;
}

CounterRng sampler_stream(std::uint64_t seed, NoisePurpose purpose, std::size_t timestep) {
  return CounterRng(seed).split(static_cast<std::uint64_t>(purpose)).split(timestep);
}

LatentSequence gaussian_like(std::span<const ChannelGrid> shape, const CounterRng& rng) {
  LatentSequence out = zeros_like(shape);
  std::uint64_t counter = 0;
  for (auto& g : out) {
    rng.fill_normal(g.data, counter);
    counter += g.data.size();
  }
  return out;
}

LatentSequence reverse_sample(const Denoiser& denoiser, std::span<const ChannelGrid> condition,
                              const NoiseSchedule& schedule, std::uint64_t seed,
                              const SamplerOptions& options) {
  schedule.validate();
  if (condition.empty()) throw ValueError("reverse_sample: empty condition sequence");
  if (options.plan && options.plan->num_frames != condition.size()) {
    throw DimensionError("reverse_sample: window plan does not match the sequence length");
  }
  LatentSequence z = gaussian_like(condition, sampler_stream(seed, NoisePurpose::initial, 0));

  for (std::size_t t = schedule.steps(); t >= 1; --t) {
    LatentSequence noisy_condition;
    std::span<const ChannelGrid> cond = condition;
    if (options.noise_condition) {
      const LatentSequence cn = gaussian_like(condition, sampler_stream(seed, NoisePurpose::condition, t));
      noisy_condition = forward_noise(condition, t, cn, schedule);
      cond = noisy_condition;
    }
    const LatentSequence eps = options.plan ? windowed_epsilon(denoiser, z, cond, t, *options.plan)
                                            : denoiser.predict(z, cond, t, 0);
    require_same_shapes(z, eps, "reverse_sample");

    const double beta = schedule.beta_at(t);
    const double ab = schedule.alpha_bar_at(t);
    const double ab_prev = schedule.alpha_bar_at(t - 1);
    const double eps_scale = beta / std::sqrt(1.0 - ab);
    const double inv_sqrt_alpha = 1.0 / std::sqrt(schedule.alpha_at(t));
    const double sigma = t > 1 ? std::sqrt(beta * (1.0 - ab_prev) / (1.0 - ab)) : 0.0;

    LatentSequence n;
    if (t > 1) n = gaussian_like(z, sampler_stream(seed, NoisePurpose::ancestral, t));
    for (std::size_t f = 0; f < z.size(); ++f) {
      auto& zd = z[f].data;
      const auto& ed = eps[f].data;
      for (std::size_t k = 0; k < zd.size(); ++k) {
        double next = (zd[k] - eps_scale * ed[k]) * inv_sqrt_alpha;
        if (t > 1) next += sigma * n[f].data[k];
        zd[k] = static_cast<float>(next);
      }
    }
    if (t == 1) break;
  }
  return z;
}

}  // namespace s2s
