#include "lfr/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "lfr/error.hpp"

namespace lfr {
namespace {

LoadedImage from_mat(const cv::Mat& mat, const std::string& origin) {
  if (mat.empty()) throw IngestError(IngestError::Kind::format, "cannot decode image " + origin);

  int bit_depth = 0;
  double scale = 0.0;
  switch (mat.depth()) {
    case CV_8U: bit_depth = 8; scale = 255.0; break;
    case CV_16U: bit_depth = 16; scale = 65535.0; break;
    default: throw IngestError(IngestError::Kind::format, "unsupported sample depth in " + origin);
  }

  // OpenCV hands us BGR(A); we keep RGB and drop alpha.
  const int src_channels = mat.channels();
  const int channels = src_channels == 1 ? 1 : 3;
  if (src_channels != 1 && src_channels != 3 && src_channels != 4)
    throw IngestError(IngestError::Kind::format, "unsupported channel count in " + origin);

  Image img(mat.rows, mat.cols, channels);
  for (int y = 0; y < mat.rows; ++y) {
    for (int x = 0; x < mat.cols; ++x) {
      for (int c = 0; c < channels; ++c) {
        const int src_c = channels == 1 ? 0 : 2 - c;
        double raw = 0.0;
        if (bit_depth == 8)
          raw = mat.ptr<std::uint8_t>(y)[x * src_channels + src_c];
        else
          raw = mat.ptr<std::uint16_t>(y)[x * src_channels + src_c];
        img.at(y, x, c) = static_cast<float>(raw / scale);
      }
    }
  }
  return {std::move(img), bit_depth};
}

cv::Mat to_mat(const Image& image, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw ValidationError("bit depth must be 8 or 16");
  const int channels = image.channels();
  if (channels != 1 && channels != 3) throw ValidationError("only 1- or 3-channel images can be exported");

  const double scale = bit_depth == 8 ? 255.0 : 65535.0;
  cv::Mat mat(image.height(), image.width(), CV_MAKETYPE(bit_depth == 8 ? CV_8U : CV_16U, channels));
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < channels; ++c) {
        const int dst_c = channels == 1 ? 0 : 2 - c;
        const double v = std::clamp(static_cast<double>(image.at(y, x, c)), 0.0, 1.0);
        const auto q = std::lround(v * scale);
        if (bit_depth == 8)
          mat.ptr<std::uint8_t>(y)[x * channels + dst_c] = static_cast<std::uint8_t>(q);
        else
          mat.ptr<std::uint16_t>(y)[x * channels + dst_c] = static_cast<std::uint16_t>(q);
      }
    }
  }
  return mat;
}

}  // namespace

LoadedImage load_png(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw IngestError(IngestError::Kind::path, path.string());
  return from_mat(cv::imread(path.string(), cv::IMREAD_UNCHANGED), path.string());
}

LoadedImage decode_png(const std::vector<std::uint8_t>& bytes) {
  if (bytes.empty()) throw IngestError(IngestError::Kind::format, "empty image buffer");
  return from_mat(cv::imdecode(bytes, cv::IMREAD_UNCHANGED), "<memory>");
}

void save_png(const Image& image, const std::filesystem::path& path, int bit_depth) {
  const auto bytes = encode_png(image, bit_depth);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ValidationError("failed writing " + path.string());
}

std::vector<std::uint8_t> encode_png(const Image& image, int bit_depth) {
  std::vector<std::uint8_t> bytes;
  if (!cv::imencode(".png", to_mat(image, bit_depth), bytes)) throw ValidationError("PNG encoding failed");
  return bytes;
}

}  // namespace lfr
