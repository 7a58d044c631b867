#pragma once

#include "blendkit/image.hpp"

namespace blendkit {

/// Per-channel 5-point Laplacian field.
using LaplacianField = PixelField;

/// L(p) = 4 I(p) - sum of the four neighbors, with replicate padding at the
/// border. The operator is symmetric, so it is also its own adjoint.
/// Throws ValidationError when either dimension is below 3.
template <class Tag>
LaplacianField laplacian(const Raster3<Tag>& img);

extern template LaplacianField laplacian(const ImageRGB&);
extern template LaplacianField laplacian(const PixelField&);

/// Target-sized guidance: laplacian(target) outside the placed mask,
/// laplacian(source) shifted by the placement inside it.
LaplacianField guidance_field(const BlendTask& task, const BinaryMask& refined_mask);

struct PoissonOptions {
  double tol = 1e-6;
  int max_iters = 10000;
};

/// Seamless clone: the placed-mask pixels solve 4x(p) - sum x(q) = g(p) with
/// target pixels as Dirichlet values, one conjugate-gradient solve per
/// channel. Everything outside the placed mask is copied from the target.
/// Throws ConvergenceError when the relative residual stays above tol.
ImageRGB poisson_blend(const BlendTask& task, const BinaryMask& refined_mask,
                       const PoissonOptions& options = {});

/// Mean squared Laplacian residual over the seam band: pixels of the placed
/// mask with a 4-neighbor outside it, plus those outside neighbors.
double seam_residual(const ImageRGB& img, const LaplacianField& guidance,
                     const BinaryMask& placed_mask);

}  // namespace blendkit
