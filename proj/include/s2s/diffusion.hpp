#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "s2s/grid.hpp"
#include "s2s/rng.hpp"

namespace s2s {

using LatentSequence = std::vector<ChannelGrid>;

// Naming: `timestep` is the diffusion step t in [1, T]; `frame_index` is a
// position in the latent sequence.

struct NoiseSchedule {
  std::vector<double> beta;       // beta[t-1] for t = 1..T
  std::vector<double> alpha;      // 1 - beta
  std::vector<double> alpha_bar;  // running product of alpha
  double beta_start = 0.0;
  double beta_end = 0.0;

  std::size_t steps() const { return beta.size(); }
  double beta_at(std::size_t t) const { return beta.at(t - 1); }
  double alpha_at(std::size_t t) const { return alpha.at(t - 1); }
  /// alpha_bar_0 = 1 by convention.
  double alpha_bar_at(std::size_t t) const { return t == 0 ? 1.0 : alpha_bar.at(t - 1); }
  void validate() const;
};

/// Linear beta from beta_start to beta_end over T steps (beta_start when T = 1).
NoiseSchedule make_schedule(std::size_t steps, double beta_start, double beta_end);

/// Z_t = sqrt(alpha_bar_t) Z_0 + sqrt(1 - alpha_bar_t) eps, elementwise.
LatentSequence forward_noise(std::span<const ChannelGrid> z0, std::size_t timestep,
                             std::span<const ChannelGrid> noise, const NoiseSchedule& schedule);

/// Predicts the injected noise for a run of frames starting at
/// `first_frame`. Must be deterministic and safe to call concurrently.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual LatentSequence predict(std::span<const ChannelGrid> noisy,
                                 std::span<const ChannelGrid> condition, std::size_t timestep,
                                 std::size_t first_frame) const = 0;
};

class ZeroDenoiser final : public Denoiser {
 public:
  LatentSequence predict(std::span<const ChannelGrid> noisy, std::span<const ChannelGrid>,
                         std::size_t, std::size_t) const override;
};

class ConstantDenoiser final : public Denoiser {
 public:
  explicit ConstantDenoiser(float value) : value_(value) {}
  LatentSequence predict(std::span<const ChannelGrid> noisy, std::span<const ChannelGrid>,
                         std::size_t, std::size_t) const override;

 private:
  float value_;
};

/// Knows the clean sequence and returns the exact noise consistent with the
/// current sample: (Z_t - sqrt(alpha_bar_t) Z_0) / sqrt(1 - alpha_bar_t).
class OracleDenoiser final : public Denoiser {
 public:
  OracleDenoiser(LatentSequence clean, NoiseSchedule schedule)
      : clean_(std::move(clean)), schedule_(std::move(schedule)) {}
  LatentSequence predict(std::span<const ChannelGrid> noisy, std::span<const ChannelGrid>,
                         std::size_t timestep, std::size_t first_frame) const override;

 private:
  LatentSequence clean_;
  NoiseSchedule schedule_;
};

/// "zero", "constant:<value>", or "oracle" (requires `clean`).
std::unique_ptr<Denoiser> make_denoiser(const std::string& name, const NoiseSchedule& schedule,
                                        const LatentSequence* clean = nullptr);

/// Mean over all elements of (eps - eps_hat)^2 with
/// eps_hat = predict(forward_noise(z0, t, eps), condition, t). With
/// `condition_noise` set, the condition is noised to the same level first.
double training_loss(const Denoiser& denoiser, std::span<const ChannelGrid> z0,
                     std::span<const ChannelGrid> condition, std::size_t timestep,
                     std::span<const ChannelGrid> noise, const NoiseSchedule& schedule,
                     std::span<const ChannelGrid> condition_noise = {});

struct WindowPlan {
  std::vector<std::pair<std::size_t, std::size_t>> windows;  // [start, end)
  std::size_t window = 0;
  std::size_t stride = 0;
  std::size_t num_frames = 0;

  /// Number of windows containing each frame.
  std::vector<std::size_t> membership() const;
};

/// Windows [kS, min(kS + W, T)) for k = 0, 1, ... until the last frame is
/// covered.
WindowPlan plan_windows(std::size_t num_frames, std::size_t window, std::size_t stride);

/// Runs the denoiser on every window and averages each frame's predictions
/// over the windows that contain it (summed in window order).
LatentSequence windowed_epsilon(const Denoiser& denoiser, std::span<const ChannelGrid> noisy,
                                std::span<const ChannelGrid> condition, std::size_t timestep,
                                const WindowPlan& plan);

// Noise streams used by reverse_sample. Element k of frame f (flattened)
// draws counter (frame offset + k) from
//   CounterRng(seed).split(purpose).split(timestep).
enum class NoisePurpose : std::uint64_t { initial = 1, ancestral = 2, condition = 3 };

CounterRng sampler_stream(std::uint64_t seed, NoisePurpose purpose, std::size_t timestep);
LatentSequence gaussian_like(std::span<const ChannelGrid> shape, const CounterRng& rng);

struct SamplerOptions {
  std::optional<WindowPlan> plan;  // sliding-window averaging when set
  bool noise_condition = false;    // also noise the condition to level t
};

/// Ancestral DDPM sampling from Z_T ~ N(0, I) with the target shaped like
/// `condition`:
///   Z_{t-1} = (Z_t - beta_t / sqrt(1 - alpha_bar_t) eps_hat) / sqrt(alpha_t) + sigma_t n,
///   sigma_t^2 = beta_t (1 - alpha_bar_{t-1}) / (1 - alpha_bar_t), n = 0 at t = 1.
LatentSequence reverse_sample(const Denoiser& denoiser, std::span<const ChannelGrid> condition,
                              const NoiseSchedule& schedule, std::uint64_t seed,
                              const SamplerOptions& options = {});

}  // namespace s2s
