#pragma once

#include <string>

#include "csas/core.hpp"

namespace csas {

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Pixels within `radius` of the image centre ((n-1)/2, (n-1)/2).
Mask circular_mask(Eigen::Index rows, Eigen::Index cols, double radius);

/// |x| / max|x| over the masked pixels, zero outside the mask.
RealImage normalized_magnitude(const CImage& x, const Mask& mask);
RealImage normalized_magnitude(const RealImage& x, const Mask& mask);

/// 10 log10(1 / MSE) over the masked pixels; +inf when the images agree.
double image_psnr(const RealImage& a, const RealImage& b, const Mask& mask);

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double data_range = 1.0;
};

/// Mean local SSIM with a Gaussian window, over window centres that keep the
/// window inside the image and lie within the mask.
double image_ssim(const RealImage& a, const RealImage& b, const Mask& mask, const SsimOptions& opts = {});

struct MetricReport {
  std::string scene;
  std::string method;
  double noise_psnr_db = 0.0;  // +inf for noiseless runs
  double psnr_db = 0.0;
  double ssim = 0.0;
  double mask_radius = 0.0;
  bool psnr_infinite() const;
};

/// Compares |field| against the ground-truth magnitude after max-normalising
/// both over the circular mask.
MetricReport evaluate(const CImage& estimate, const RealImage& truth, double mask_radius, std::string scene,
                      std::string method, double noise_psnr_db);

/// Header `scene,method,noise_psnr_db,psnr_db,ssim`.
std::string csv_header();
std::string csv_row(const MetricReport& r);

}  // namespace csas
