#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lfr {

/// Inclusive pixel rectangle: columns x0..x1, rows y0..y1.
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0 + 1; }
  int height() const noexcept { return y1 - y0 + 1; }
  bool contains(int y, int x) const noexcept { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  bool inside(int height, int width) const noexcept {
    return x0 >= 0 && y0 >= 0 && x0 <= x1 && y0 <= y1 && x1 < width && y1 < height;
  }

  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// Interleaved (H, W, C) float image. Pixel values are expected in [0, 1].
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, float fill = 0.0f);
  Image(int height, int width, int channels, std::vector<float> pixels);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  float& at(int y, int x, int c = 0) noexcept { return pixels_[index(y, x, c)]; }
  float at(int y, int x, int c = 0) const noexcept { return pixels_[index(y, x, c)]; }

  std::span<float> pixels() noexcept { return pixels_; }
  std::span<const float> pixels() const noexcept { return pixels_; }

  std::span<float> row(int y) noexcept {
    return std::span<float>(pixels_).subspan(static_cast<std::size_t>(y) * width_ * channels_,
                                             static_cast<std::size_t>(width_) * channels_);
  }
  std::span<const float> row(int y) const noexcept {
    return std::span<const float>(pixels_).subspan(static_cast<std::size_t>(y) * width_ * channels_,
                                                   static_cast<std::size_t>(width_) * channels_);
  }

  Image crop(const PixelRect& rect) const;
  /// Single channel `c` as a (H, W, 1) image.
  Image channel(int c) const;
  /// Rec.601 luma for 3-channel images; copy for single-channel ones.
  Image luma() const;

  bool same_shape(const Image& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int y, int x, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> pixels_;
};

}  // namespace lfr
