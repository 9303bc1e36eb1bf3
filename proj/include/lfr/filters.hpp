#pragma once

#include <span>
#include <vector>

#include "lfr/image.hpp"

namespace lfr {

/// Row-major double-precision scalar field used by the filtering kernels.
struct Plane {
  int height = 0;
  int width = 0;
  std::vector<double> values;

  Plane() = default;
  Plane(int h, int w, double fill = 0.0)
      : height(h), width(w), values(static_cast<std::size_t>(h) * w, fill) {}

  double& operator()(int y, int x) noexcept { return values[static_cast<std::size_t>(y) * width + x]; }
  double operator()(int y, int x) const noexcept { return values[static_cast<std::size_t>(y) * width + x]; }
};

Plane to_plane(const Image& image, int channel = 0);
Image to_image(const Plane& plane);

/// Normalized sampled Gaussian with 2*radius+1 taps.
std::vector<double> gaussian_kernel(int radius, double sigma);

/// Separable correlation with replicate-edge padding. The kernels must be normalized;
/// constant inputs are reproduced exactly.
Plane blur_replicate(const Plane& in, std::span<const double> kernel_x, std::span<const double> kernel_y);

/// Separable correlation over the region where the window fits entirely ("valid").
/// The output is (H - ky + 1) x (W - kx + 1).
Plane filter_valid(const Plane& in, std::span<const double> kernel_x, std::span<const double> kernel_y);

}  // namespace lfr
