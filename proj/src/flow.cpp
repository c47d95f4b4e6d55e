#include "s2s/flow.hpp"

#include <algorithm>
#include <string>

#include "s2s/error.hpp"

namespace s2s {

AccumulatedFlow compose_accumulated(const AccumulatedFlow& base, const FlowField& hop,
                                    std::size_t next_source) {
  if (!base.flow.same_shape(hop)) {
    throw DimensionError("compose_accumulated: hop flow does not match the accumulated flow");
  }
  if (base.hops == 0) throw ValueError("compose_accumulated: base must have at least one hop");
  FlowField resampled = warp_flow(hop, base.flow);
  AccumulatedFlow out{base.target, next_source, FlowField::invalid(hop.height, hop.width),
                      base.hops + 1};
  for (std::size_t i = 0; i < hop.size(); ++i) {
    if (!(base.flow.valid[i] && resampled.valid[i])) continue;
    out.flow.u[i] = base.flow.u[i] + resampled.u[i];
    out.flow.v[i] = base.flow.v[i] + resampled.v[i];
    out.flow.valid[i] = 1;
  }
  return out;
}

FlowField map_flow_to_canvas(const FlowField& flow, const CanvasSpec& spec) {
  spec.validate();
  if (flow.height != spec.orig_h || flow.width != spec.orig_w) {
    throw DimensionError("map_flow_to_canvas: flow is " + std::to_string(flow.height) + "x" +
                         std::to_string(flow.width) + ", spec expects " +
                         std::to_string(spec.orig_h) + "x" + std::to_string(spec.orig_w));
  }
  FlowField out = FlowField::invalid(spec.canvas_h, spec.canvas_w);
  for (std::size_t y = 0; y < flow.height; ++y) {
    const std::size_t src = flow.index(y, 0);
    const std::size_t dst = out.index(y + spec.offset_y, spec.offset_x);
    std::copy_n(flow.u.begin() + src, flow.width, out.u.begin() + dst);
    std::copy_n(flow.v.begin() + src, flow.width, out.v.begin() + dst);
    std::copy_n(flow.valid.begin() + src, flow.width, out.valid.begin() + dst);
  }
  return out;
}

FlowField LaplacianCompleter::complete(const FlowField& flow_on_canvas,
                                       const BinaryMask& missing) const {
  return complete_flow_laplacian(flow_on_canvas, missing, options_);
}

CompleterRegistry::CompleterRegistry() {
  add("laplacian", [](const CompletionOptions& o) { return std::make_unique<LaplacianCompleter>(o); });
}

CompleterRegistry& CompleterRegistry::instance() {
  static CompleterRegistry registry;
  return registry;
}

void CompleterRegistry::add(const std::string& name, Factory factory) {
  factories_[name] = std::move(factory);
}

bool CompleterRegistry::contains(const std::string& name) const {
  return factories_.count(name) != 0;
}

std::unique_ptr<FlowCompleter> CompleterRegistry::create(const std::string& name,
                                                         const CompletionOptions& options) const {
  auto it = factories_.find(name);
  if (it == factories_.end()) throw ConfigError("unknown flow completer '" + name + "'");
  return it->second(options);
}

std::vector<std::string> CompleterRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : factories_) out.push_back(name);
  return out;
}

}  // namespace s2s
