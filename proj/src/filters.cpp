#include "lfr/filters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lfr {

Plane to_plane(const Image& image, int channel) {
  Plane p(image.height(), image.width());
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) p(y, x) = image.at(y, x, channel);
  return p;
}

Image to_image(const Plane& plane) {
  Image img(plane.height, plane.width, 1);
  for (int y = 0; y < plane.height; ++y)
    for (int x = 0; x < plane.width; ++x) img.at(y, x) = static_cast<float>(plane(y, x));
  return img;
}

std::vector<double> gaussian_kernel(int radius, double sigma) {
  if (radius < 0 || !(sigma > 0.0)) throw std::invalid_argument("gaussian kernel needs radius >= 0, sigma > 0");
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (auto& w : k) w /= sum;
  return k;
}

// Each tap contributes w * (sample - centre), so a constant neighbourhood yields the
// centre value bit-exactly regardless of rounding in the kernel sum.
Plane blur_replicate(const Plane& in, std::span<const double> kernel_x, std::span<const double> kernel_y) {
  const int rx = static_cast<int>(kernel_x.size()) / 2;
  const int ry = static_cast<int>(kernel_y.size()) / 2;
  Plane tmp(in.height, in.width);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      const double centre = in(y, x);
      double acc = 0.0;
      for (int k = -rx; k <= rx; ++k) {
        const int xx = std::clamp(x + k, 0, in.width - 1);
        acc += kernel_x[k + rx] * (in(y, xx) - centre);
      }
      tmp(y, x) = centre + acc;
    }
  }
  Plane out(in.height, in.width);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      const double centre = tmp(y, x);
      double acc = 0.0;
      for (int k = -ry; k <= ry; ++k) {
        const int yy = std::clamp(y + k, 0, in.height - 1);
        acc += kernel_y[k + ry] * (tmp(yy, x) - centre);
      }
      out(y, x) = centre + acc;
    }
  }
  return out;
}

Plane filter_valid(const Plane& in, std::span<const double> kernel_x, std::span<const double> kernel_y) {
  const int kx = static_cast<int>(kernel_x.size());
  const int ky = static_cast<int>(kernel_y.size());
  const int out_w = in.width - kx + 1;
  const int out_h = in.height - ky + 1;
  if (out_w < 1 || out_h < 1) throw std::invalid_argument("plane smaller than filter window");

  Plane tmp(in.height, out_w);
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kx; ++k) acc += kernel_x[k] * in(y, x + k);
      tmp(y, x) = acc;
    }
  Plane out(out_h, out_w);
  for (int y = 0; y < out_h; ++y)
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < ky; ++k) acc += kernel_y[k] * tmp(y + k, x);
      out(y, x) = acc;
    }
  return out;
}

}  // namespace lfr
