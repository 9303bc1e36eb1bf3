#include "lfr/image.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace lfr {

Image::Image(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels) {
  if (height < 1 || width < 1 || channels < 1)
    throw std::invalid_argument("image dimensions must be positive");
  pixels_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

Image::Image(int height, int width, int channels, std::vector<float> pixels)
    : height_(height), width_(width), channels_(channels), pixels_(std::move(pixels)) {
  if (height < 1 || width < 1 || channels < 1)
    throw std::invalid_argument("image dimensions must be positive");
  if (pixels_.size() != static_cast<std::size_t>(height) * width * channels)
    throw std::invalid_argument("pixel buffer size " + std::to_string(pixels_.size()) +
                                " does not match image dimensions");
}

Image Image::crop(const PixelRect& rect) const {
  if (!rect.inside(height_, width_)) throw std::out_of_range("crop rectangle outside image");
  Image out(rect.height(), rect.width(), channels_);
  for (int y = 0; y < out.height(); ++y) {
    auto src = row(rect.y0 + y).subspan(static_cast<std::size_t>(rect.x0) * channels_,
                                        static_cast<std::size_t>(out.width()) * channels_);
    std::copy(src.begin(), src.end(), out.row(y).begin());
  }
  return out;
}

Image Image::channel(int c) const {
  Image out(height_, width_, 1);
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x) out.at(y, x) = at(y, x, c);
  return out;
}

Image Image::luma() const {
  if (channels_ == 1) return *this;
  Image out(height_, width_, 1);
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x)
      out.at(y, x) = static_cast<float>(0.299 * at(y, x, 0) + 0.587 * at(y, x, 1) + 0.114 * at(y, x, 2));
  return out;
}

}  // namespace lfr
