#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "s2s/grid.hpp"
#include "s2s/kernels.hpp"

namespace s2s {

/// Flow from target frame `target` to reference `source`, built from `hops`
/// reference-to-reference steps (the first step is the directly estimated
/// target-to-nearest-reference flow).
struct AccumulatedFlow {
  std::size_t target = 0;
  std::size_t source = 0;
  FlowField flow;
  std::size_t hops = 1;
};

/// base.flow + warp_flow(hop, base.flow): extends target->r_t to target->r_t+1
/// given the hop r_t -> r_t+1. Validity is the intersection of both terms.
AccumulatedFlow compose_accumulated(const AccumulatedFlow& base, const FlowField& hop,
                                    std::size_t next_source);

/// Places an original-resolution flow on the canvas; cells outside the
/// original rectangle are invalid.
FlowField map_flow_to_canvas(const FlowField& flow, const CanvasSpec& spec);

enum class SweepOrder { lexicographic, red_black };

struct CompletionOptions {
  double tol = 1e-6;
  std::size_t max_iters = 0;  // 0 selects 10 * H * W
  SweepOrder order = SweepOrder::lexicographic;
};

struct CompletionStats {
  std::size_t iterations = 0;
  double final_update = 0.0;
};

/// Harmonic fill of the unknown cells (missing=1 or valid=0) of u and v with
/// the known cells as Dirichlet data and zero-flux grid borders, by
/// Gauss-Seidel sweeps until the largest update drops below `tol`.
/// Throws ValueError without known cells and ConvergenceError (carrying the
/// last update size) when `max_iters` is exhausted.
FlowField complete_flow_laplacian(const FlowField& flow, const BinaryMask& missing,
                                  const CompletionOptions& options = {},
                                  CompletionStats* stats = nullptr);

/// Contract: the output is valid everywhere and bit-identical to the input
/// wherever missing=0 and the input is valid.
class FlowCompleter {
 public:
  virtual ~FlowCompleter() = default;
  virtual FlowField complete(const FlowField& flow_on_canvas, const BinaryMask& missing) const = 0;
  virtual std::string name() const = 0;
};

class LaplacianCompleter final : public FlowCompleter {
 public:
  explicit LaplacianCompleter(CompletionOptions options = {}) : options_(options) {}
  FlowField complete(const FlowField& flow_on_canvas, const BinaryMask& missing) const override;
  std::string name() const override { return "laplacian"; }
  const CompletionOptions& options() const { return options_; }

 private:
  CompletionOptions options_;
};

/// Name -> factory table used by configuration. "laplacian" is always
/// registered.
class CompleterRegistry {
 public:
  using Factory = std::function<std::unique_ptr<FlowCompleter>(const CompletionOptions&)>;

  static CompleterRegistry& instance();
  void add(const std::string& name, Factory factory);
  bool contains(const std::string& name) const;
  std::unique_ptr<FlowCompleter> create(const std::string& name,
                                        const CompletionOptions& options) const;
  std::vector<std::string> names() const;

 private:
  CompleterRegistry();
  std::map<std::string, Factory> factories_;
};

}  // namespace s2s
