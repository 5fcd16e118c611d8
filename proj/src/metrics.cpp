#include "csas/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace csas {

Mask circular_mask(Eigen::Index rows, Eigen::Index cols, double radius) {
  Mask m(rows, cols);
  const double cr = 0.5 * (rows - 1), cc = 0.5 * (cols - 1);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = std::hypot(r - cr, c - cc) <= radius;
  return m;
}

RealImage normalized_magnitude(const RealImage& x, const Mask& mask) {
  require(x.rows() == mask.rows() && x.cols() == mask.cols(), "normalized_magnitude: mask shape mismatch");
  RealImage mag = mask.select(x.cwiseAbs().array(), 0.0).matrix();
  const double peak = mag.maxCoeff();
  if (peak > 0.0) mag /= peak;
  return mag;
}

RealImage normalized_magnitude(const CImage& x, const Mask& mask) {
  return normalized_magnitude(RealImage(x.cwiseAbs()), mask);
}

double image_psnr(const RealImage& a, const RealImage& b, const Mask& mask) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "image_psnr: shape mismatch");
  require(a.rows() == mask.rows() && a.cols() == mask.cols(), "image_psnr: mask shape mismatch");
  double sum = 0.0;
  long count = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!mask(i)) continue;
    const double d = a(i) - b(i);
    sum += d * d;
    ++count;
  }
  require(count > 0, "image_psnr: empty mask");
  const double mse = sum / static_cast<double>(count);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double image_ssim(const RealImage& a, const RealImage& b, const Mask& mask, const SsimOptions& o) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "image_ssim: shape mismatch");
  require(o.window >= 1 && o.window % 2 == 1, "image_ssim: window must be odd");
  require(a.rows() >= o.window && a.cols() >= o.window, "image_ssim: image smaller than the SSIM window");
  const int h = o.window / 2;

  RealImage g(o.window, o.window);
  for (int i = 0; i < o.window; ++i)
    for (int j = 0; j < o.window; ++j)
      g(i, j) = std::exp(-((i - h) * (i - h) + (j - h) * (j - h)) / (2.0 * o.sigma * o.sigma));
  g /= g.sum();

  const double c1 = (o.k1 * o.data_range) * (o.k1 * o.data_range);
  const double c2 = (o.k2 * o.data_range) * (o.k2 * o.data_range);
  double total = 0.0;
  long count = 0;
  for (Eigen::Index r = h; r < a.rows() - h; ++r)
    for (Eigen::Index c = h; c < a.cols() - h; ++c) {
      if (!mask(r, c)) continue;
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int i = 0; i < o.window; ++i)
        for (int j = 0; j < o.window; ++j) {
          const double w = g(i, j), va = a(r - h + i, c - h + j), vb = b(r - h + i, c - h + j);
          ma += w * va;
          mb += w * vb;
          saa += w * va * va;
          sbb += w * vb * vb;
          sab += w * va * vb;
        }
      const double va = saa - ma * ma, vb = sbb - mb * mb, cov = sab - ma * mb;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  require(count > 0, "image_ssim: no window centres inside the mask");
  return total / static_cast<double>(count);
}

bool MetricReport::psnr_infinite() const { return std::isinf(psnr_db); }

MetricReport evaluate(const CImage& estimate, const RealImage& truth, double mask_radius, std::string scene,
                      std::string method, double noise_psnr_db) {
  const Mask mask = circular_mask(truth.rows(), truth.cols(), mask_radius);
  const RealImage est = normalized_magnitude(estimate, mask);
  const RealImage ref = normalized_magnitude(truth, mask);
  MetricReport r;
  r.scene = std::move(scene);
  r.method = std::move(method);
  r.noise_psnr_db = noise_psnr_db;
  r.psnr_db = image_psnr(est, ref, mask);
  r.ssim = image_ssim(est, ref, mask);
  r.mask_radius = mask_radius;
  return r;
}

std::string csv_header() { return "scene,method,noise_psnr_db,psnr_db,ssim"; }

std::string csv_row(const MetricReport& r) {
  auto num = [](double v) {
    if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
    std::ostringstream s;
    s << std::setprecision(6) << v;
    return s.str();
  };
  return r.scene + "," + r.method + "," + num(r.noise_psnr_db) + "," + num(r.psnr_db) + "," + num(r.ssim);
}

}  // namespace csas
