#pragma once

#include <array>

#include "lfr/image.hpp"

namespace lfr {

/// Peak value of every metric: images are normalized to [0, 1].
inline constexpr double kDataRange = 1.0;
/// PSNR reported for (near-)identical images, so 1/PSNR stays finite.
inline constexpr double kPsnrCapDb = 100.0;

inline constexpr std::array<double, 5> kMsSsimWeights = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

double mse(const Image& a, const Image& b);
double l1(const Image& a, const Image& b);
/// 10 log10(1 / MSE), capped at kPsnrCapDb once MSE < 1e-10.
double psnr(const Image& a, const Image& b);

/// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03, mean over
/// the valid-window map, averaged over channels. Needs both sides >= 11 px.
double ssim(const Image& a, const Image& b);

/// Multi-scale SSIM over `scales` dyadic levels (2x2 mean downsampling). Contrast-structure
/// means are used at the finer levels and the full SSIM mean at the coarsest; weights are the
/// first `scales` canonical weights renormalized to sum to one. Negative per-scale terms are
/// clamped to zero, so the result lies in [0, 1].
double ms_ssim(const Image& a, const Image& b, int scales = 5);

/// Largest scale count usable on an image whose smaller side is `min_side`:
/// floor(log2(min_side / 8)) clamped to [1, 5].
int auto_ms_ssim_scales(int min_side);

}  // namespace lfr
