#include "blendkit/poisson.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "blendkit/error.hpp"
#include "blendkit/parallel.hpp"

namespace blendkit {

namespace {

constexpr std::array<std::array<int, 2>, 4> kNeighbors{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

double dot(std::span<const double> a, std::span<const double> b, std::vector<double>& scratch) {
  scratch.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) scratch[i] = a[i] * b[i];
  return pairwise_sum(scratch);
}

// Unknowns of the Dirichlet problem in row-major order, plus the neighbor
// structure of the system matrix. A neighbor that falls outside the image is
// the pixel itself under replicate padding, so it only lowers the diagonal.
struct InteriorSystem {
  std::vector<int> ys, xs;
  std::vector<double> diagonal;
  std::vector<std::array<int, 4>> coupled;  // unknown index or -1
};

InteriorSystem build_system(const BinaryMask& placed) {
  InteriorSystem sys;
  std::vector<int> id(static_cast<std::size_t>(placed.height()) * static_cast<std::size_t>(placed.width()), -1);
  for (int y = 0; y < placed.height(); ++y)
    for (int x = 0; x < placed.width(); ++x)
      if (placed.at(y, x)) {
        id[static_cast<std::size_t>(y) * static_cast<std::size_t>(placed.width()) + static_cast<std::size_t>(x)] =
            static_cast<int>(sys.ys.size());
        sys.ys.push_back(y);
        sys.xs.push_back(x);
      }
  const std::size_t n = sys.ys.size();
  sys.diagonal.assign(n, 4.0);
  sys.coupled.assign(n, {-1, -1, -1, -1});
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t d = 0; d < kNeighbors.size(); ++d) {
      const int qy = sys.ys[k] + kNeighbors[d][0];
      const int qx = sys.xs[k] + kNeighbors[d][1];
      if (qy < 0 || qx < 0 || qy >= placed.height() || qx >= placed.width()) {
        sys.diagonal[k] -= 1.0;
      } else if (placed.at(qy, qx)) {
        sys.coupled[k][d] = id[static_cast<std::size_t>(qy) * static_cast<std::size_t>(placed.width()) + static_cast<std::size_t>(qx)];
      }
    }
  }
  return sys;
}

void apply_system(const InteriorSystem& sys, std::span<const double> x, std::span<double> out) {
  for (std::size_t k = 0; k < x.size(); ++k) {
    double v = sys.diagonal[k] * x[k];
    for (int j : sys.coupled[k])
      if (j >= 0) v -= x[static_cast<std::size_t>(j)];
    out[k] = v;
  }
}

struct SolveResult {
  std::vector<double> x;
  double residual = 0.0;
  bool converged = false;
};

SolveResult conjugate_gradient(const InteriorSystem& sys, std::span<const double> rhs,
                               std::vector<double> x, const PoissonOptions& opt) {
  const std::size_t n = rhs.size();
  std::vector<double> scratch, r(n), p(n), ap(n);
  apply_system(sys, x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
  const double rhs_norm = std::sqrt(dot(rhs, rhs, scratch));
  const double denom = rhs_norm > 0.0 ? rhs_norm : 1.0;
  double rr = dot(r, r, scratch);
  SolveResult res;
  res.residual = std::sqrt(rr) / denom;
  p = r;
  for (int it = 0; it < opt.max_iters && res.residual > opt.tol; ++it) {
    apply_system(sys, p, ap);
    const double pap = dot(p, ap, scratch);
    if (!(pap > 0.0)) break;
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_next = dot(r, r, scratch);
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    res.residual = std::sqrt(rr) / denom;
  }
  res.converged = res.residual <= opt.tol;
  res.x = std::move(x);
  return res;
}

}  // namespace

template <class Tag>
LaplacianField laplacian(const Raster3<Tag>& img) {
  const int h = img.height(), w = img.width();
  if (h < 3 || w < 3)
    throw ValidationError("image too small for a Laplacian: " + std::to_string(w) + "x" +
                          std::to_string(h));
  LaplacianField out(h, w);
  parallel_for(0, h, [&](int y) {
    const int up = y > 0 ? y - 1 : y;
    const int down = y + 1 < h ? y + 1 : y;
    for (int x = 0; x < w; ++x) {
      const int left = x > 0 ? x - 1 : x;
      const int right = x + 1 < w ? x + 1 : x;
      for (int c = 0; c < 3; ++c) {
        const double v = img.at(y, x, c);
        out.at(y, x, c) = (v - img.at(up, x, c)) + (v - img.at(down, x, c)) +
                          (v - img.at(y, left, c)) + (v - img.at(y, right, c));
      }
    }
  });
  return out;
}

template LaplacianField laplacian(const ImageRGB&);
template LaplacianField laplacian(const PixelField&);

LaplacianField guidance_field(const BlendTask& task, const BinaryMask& refined_mask) {
  task.check_mask(refined_mask);
  LaplacianField g = laplacian(task.target());
  if (refined_mask.empty()) return g;
  const LaplacianField src = laplacian(task.source());
  const Placement& pl = task.placement();
  for (int y = 0; y < refined_mask.height(); ++y)
    for (int x = 0; x < refined_mask.width(); ++x)
      if (refined_mask.at(y, x))
        for (int c = 0; c < 3; ++c) g.at(y + pl.offset_y, x + pl.offset_x, c) = src.at(y, x, c);
  return g;
}

ImageRGB poisson_blend(const BlendTask& task, const BinaryMask& refined_mask,
                       const PoissonOptions& options) {
  if (!(options.tol > 0.0)) throw ValidationError("solver tolerance must be positive");
  task.check_mask(refined_mask);
  const ImageRGB& target = task.target();
  const BinaryMask placed =
      place_mask(refined_mask, task.placement(), target.height(), target.width());
  ImageRGB out = target;
  if (placed.empty()) return out;

  const LaplacianField guidance = guidance_field(task, refined_mask);
  const InteriorSystem sys = build_system(placed);
  const std::size_t n = sys.ys.size();

  std::array<SolveResult, 3> results;
  auto solve_channel = [&](int c) {
    std::vector<double> rhs(n), x0(n);
    for (std::size_t k = 0; k < n; ++k) {
      const int y = sys.ys[k], x = sys.xs[k];
      double b = guidance.at(y, x, c);
      for (const auto& d : kNeighbors) {
        const int qy = y + d[0], qx = x + d[1];
        if (qy < 0 || qx < 0 || qy >= target.height() || qx >= target.width()) continue;
        if (!placed.at(qy, qx)) b += target.at(qy, qx, c);
      }
      rhs[k] = b;
      x0[k] = target.at(y, x, c);
    }
    results[static_cast<std::size_t>(c)] = conjugate_gradient(sys, rhs, std::move(x0), options);
  };
  parallel_for(0, 3, solve_channel);

  for (int c = 0; c < 3; ++c) {
    const SolveResult& r = results[static_cast<std::size_t>(c)];
    if (!r.converged)
      throw ConvergenceError("solver did not converge: channel " + std::to_string(c) +
                                 " relative residual " + std::to_string(r.residual),
                             r.residual);
    for (std::size_t k = 0; k < n; ++k)
      out.at(sys.ys[k], sys.xs[k], c) = std::clamp(r.x[k], 0.0, 1.0);
  }
  return out;
}

double seam_residual(const ImageRGB& img, const LaplacianField& guidance,
                     const BinaryMask& placed_mask) {
  const LaplacianField lap = laplacian(img);
  std::vector<double> terms;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const bool inside = placed_mask.at(y, x);
      bool seam = false;
      for (const auto& d : kNeighbors) {
        const int qy = y + d[0], qx = x + d[1];
        if (qy < 0 || qx < 0 || qy >= img.height() || qx >= img.width()) continue;
        if (placed_mask.at(qy, qx) != inside) seam = true;
      }
      if (!seam) continue;
      for (int c = 0; c < 3; ++c) {
        const double r = lap.at(y, x, c) - guidance.at(y, x, c);
        terms.push_back(r * r);
      }
    }
  }
  if (terms.empty()) return 0.0;
  return pairwise_sum(terms) / static_cast<double>(terms.size());
}

}  // namespace blendkit
