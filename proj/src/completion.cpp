#include <omp.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "s2s/error.hpp"
#include "s2s/flow.hpp"

namespace s2s {

namespace {

struct Plane {
  std::vector<double> u, v;
};

// Mean of the in-grid 4-neighbours; zero-flux at the grid border.
inline void relax(Plane& p, std::size_t i, std::size_t h, std::size_t w, double& max_update) {
  const std::size_t y = i / w, x = i - y * w;
  double su = 0.0, sv = 0.0;
  int n = 0;
  if (x > 0) { su += p.u[i - 1]; sv += p.v[i - 1]; ++n; }
  if (x + 1 < w) { su += p.u[i + 1]; sv += p.v[i + 1]; ++n; }
  if (y > 0) { su += p.u[i - w]; sv += p.v[i - w]; ++n; }
  if (y + 1 < h) { su += p.u[i + w]; sv += p.v[i + w]; ++n; }
  if (n == 0) return;
  const double nu = su / n, nv = sv / n;
  max_update = std::max({max_update, std::abs(nu - p.u[i]), std::abs(nv - p.v[i])});
  p.u[i] = nu;
  p.v[i] = nv;
}

double sweep_lexicographic(Plane& p, const std::vector<std::size_t>& unknown, std::size_t h,
                           std::size_t w) {
  double max_update = 0.0;
  for (std::size_t i : unknown) relax(p, i, h, w, max_update);
  return max_update;
}

// Cells of one colour have no neighbours of the same colour, so each
// half-sweep is order independent and can run in parallel.
double sweep_colour(Plane& p, const std::vector<std::size_t>& cells, std::size_t h, std::size_t w) {
  double max_update = 0.0;
#pragma omp parallel for schedule(static) reduction(max : max_update)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(cells.size()); ++k) {
    relax(p, cells[static_cast<std::size_t>(k)], h, w, max_update);
  }
  return max_update;
}

}  // namespace

FlowField complete_flow_laplacian(const FlowField& flow, const BinaryMask& missing,
                                  const CompletionOptions& options, CompletionStats* stats) {
  if (missing.height != flow.height || missing.width != flow.width) {
    throw DimensionError("complete_flow_laplacian: mask does not match flow dimensions");
  }
  if (!(options.tol > 0.0)) throw ValueError("complete_flow_laplacian: tol must be > 0");
  const std::size_t h = flow.height, w = flow.width, n = flow.size();

  std::vector<std::size_t> unknown, red, black;
  double sum_u = 0.0, sum_v = 0.0;
  std::size_t known = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!missing.data[i] && flow.valid[i]) {
      sum_u += flow.u[i];
      sum_v += flow.v[i];
      ++known;
    } else {
      unknown.push_back(i);
      const std::size_t y = i / w, x = i % w;
      ((x + y) % 2 == 0 ? red : black).push_back(i);
    }
  }
  if (known == 0) throw ValueError("complete_flow_laplacian: no known flow cells");

  FlowField out = flow;
  if (stats) *stats = {};
  if (unknown.empty()) return out;

  Plane p{std::vector<double>(n), std::vector<double>(n)};
  const double mean_u = sum_u / static_cast<double>(known);
  const double mean_v = sum_v / static_cast<double>(known);
  for (std::size_t i = 0; i < n; ++i) {
    p.u[i] = flow.u[i];
    p.v[i] = flow.v[i];
  }
  for (std::size_t i : unknown) {
    p.u[i] = mean_u;
    p.v[i] = mean_v;
  }

  const std::size_t max_iters = options.max_iters ? options.max_iters : 10 * h * w;
  double update = 0.0;
  std::size_t iter = 0;
  bool converged = false;
  while (iter < max_iters) {
    ++iter;
    if (options.order == SweepOrder::lexicographic) {
      update = sweep_lexicographic(p, unknown, h, w);
    } else {
      update = std::max(sweep_colour(p, red, h, w), sweep_colour(p, black, h, w));
    }
    if (update < options.tol) {
      converged = true;
      break;
    }
  }
  if (stats) *stats = {iter, update};
  if (!converged) {
    std::ostringstream msg;
    msg << "complete_flow_laplacian: no convergence after " << iter
        << " sweeps, last max update " << update;
    throw ConvergenceError(msg.str(), update);
  }
  for (std::size_t i : unknown) {
    out.u[i] = static_cast<float>(p.u[i]);
    out.v[i] = static_cast<float>(p.v[i]);
    out.valid[i] = 1;
  }
  return out;
}

}  // namespace s2s
