#include <doctest.h>

#include <random>

#include "csas/deconv.hpp"
#include "csas/psf.hpp"
#include "csas/signal.hpp"
#include "helpers.hpp"

using namespace csas;
using test::random_cimage;
using test::brute_convolve;
using test::gradient_check;
using test::rel_err;

namespace {

Psf random_psf(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, n - 1);
  Psf psf;
  psf.image.data = random_cimage(n, n, rng);
  psf.image.grid = build_grid(n, 0.002 * (n - 1), 0.0);
  psf.center_row = pick(rng);
  psf.center_col = pick(rng);
  return psf;
}

// Smooth, well-conditioned kernel: a complex Gaussian blob at the centre.
Psf blob_psf(int n, double width) {
  Psf psf;
  psf.image.data.resize(n, n);
  psf.image.grid = build_grid(n, 0.002 * (n - 1), 0.0);
  psf.center_row = psf.center_col = n / 2;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double d2 = double((r - n / 2) * (r - n / 2) + (c - n / 2) * (c - n / 2));
      psf.image.data(r, c) = std::exp(-d2 / (2 * width * width)) * std::polar(1.0, 0.05 * (r - c));
    }
  return psf;
}

ComplexField field_of(const CImage& x, const Psf& psf) { return {x, psf.image.grid}; }
ComplexImage image_of(const CImage& x, const Psf& psf) { return {x, psf.image.grid}; }

}  // namespace

TEST_CASE("FFT convolution matches the direct sum") {
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = trial % 2 ? 32 : 16;
    const Psf psf = random_psf(n, rng);
    const CImage x = random_cimage(n, n, rng);
    worst = std::max(worst, rel_err(fft_convolve(field_of(x, psf), psf).data, brute_convolve(x, psf)));
  }
  CHECK(worst < 1e-10);
  // Odd sizes go through the same operator.
  const Psf psf = random_psf(9, rng);
  const CImage x = random_cimage(9, 9, rng);
  CHECK(rel_err(fft_convolve(field_of(x, psf), psf).data, brute_convolve(x, psf)) < 1e-10);
}

TEST_CASE("delta and zero fields") {
  std::mt19937_64 rng(2);
  const Psf psf = random_psf(16, rng);
  CImage delta = CImage::Zero(16, 16);
  delta(psf.center_row, psf.center_col) = 1.0;
  CHECK((fft_convolve(field_of(delta, psf), psf).data - psf.image.data).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(fft_convolve(field_of(CImage::Zero(16, 16), psf), psf).data.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(fft_convolve(field_of(CImage::Zero(8, 8), psf), psf), InvalidArgument);
}

TEST_CASE("adjoint identity") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Psf psf = random_psf(trial % 2 ? 16 : 15, rng);
    const ConvolutionOperator op(psf);
    const CImage x = random_cimage(op.size(), op.size(), rng), y = random_cimage(op.size(), op.size(), rng);
    const cdouble lhs = (op.apply(x).array() * y.array().conjugate()).sum();
    const cdouble rhs = (x.array() * op.adjoint(y).array().conjugate()).sum();
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
  }
}

TEST_CASE("inverse filter") {
  const Psf psf = blob_psf(16, 0.8);
  CImage delta = CImage::Zero(16, 16);
  delta(5, 9) = 1.0;
  const ComplexImage blurred = fft_convolve(field_of(delta, psf), psf);
  CHECK(rel_err(inverse_filter(blurred, psf, 1e-8).data, delta) < 1e-6);
  CHECK(inverse_filter(image_of(CImage::Zero(16, 16), psf), psf).data.cwiseAbs().maxCoeff() == 0.0);

  // Noise is amplified, never attenuated.
  std::mt19937_64 rng(4);
  const double clean = inverse_filter(blurred, psf).data.squaredNorm();
  for (int trial = 0; trial < 5; ++trial) {
    ComplexImage noisy = blurred;
    noisy.data += 1e-3 * random_cimage(16, 16, rng);
    CHECK(inverse_filter(noisy, psf).data.squaredNorm() >= clean);
  }
}

TEST_CASE("Wiener limits") {
  std::mt19937_64 rng(5);
  const Psf psf = random_psf(16, rng);
  const ConvolutionOperator op(psf);
  const ComplexImage img = image_of(random_cimage(16, 16, rng), psf);
  CHECK(rel_err(wiener(img, psf, 0.0).data, inverse_filter(img, psf, 1e-8).data) < 1e-8);
  CHECK(rel_err(wiener(img, psf, 1e-14 * op.norm_squared()).data, inverse_filter(img, psf, 1e-8).data) < 1e-8);

  // Large alpha: matched filter scaled by 1/alpha.
  const ComplexImage self = image_of(psf.image.data, psf);
  const double alpha = 1e6 * op.norm_squared();
  const CImage expect = op.adjoint(self.data) / alpha;
  CHECK(rel_err(wiener(self, psf, alpha).data, expect) < 1e-5);

  CHECK(wiener(image_of(CImage::Zero(16, 16), psf), psf, 0.3).data.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(wiener(img, psf, -1.0), InvalidArgument);
}

TEST_CASE("data-fit gradient") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Psf psf = random_psf(8, rng);
    const ConvolutionOperator op(psf);
    const CImage x = random_cimage(8, 8, rng), y = random_cimage(8, 8, rng);
    const LossGrad lg = datafit_grad(x, op, y);
    CHECK(lg.loss == doctest::Approx((op.apply(x) - y).squaredNorm()));
    CHECK(gradient_check(x, lg.grad, [&](const CImage& p) { return datafit_grad(p, op, y).loss; }) < 1e-4);
  }

  const Psf psf = random_psf(8, rng);
  const ConvolutionOperator op(psf);
  const CImage x = random_cimage(8, 8, rng);
  const LossGrad exact = datafit_grad(x, op, op.apply(x));
  CHECK(exact.loss < 1e-20);
  CHECK(exact.grad.norm() < 1e-9);

  // Scaling the residual by c scales the loss by c^2 and the gradient by c.
  const CImage y = random_cimage(8, 8, rng);
  const LossGrad one = datafit_grad(x, op, y);
  const CImage r = op.apply(x) - y;
  const LossGrad three = datafit_grad(x, op, op.apply(x) - 3.0 * r);
  CHECK(three.loss == doctest::Approx(9.0 * one.loss));
  CHECK(rel_err(three.grad, 3.0 * one.grad) < 1e-12);
}

TEST_CASE("regulariser gradients") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const CImage x = random_cimage(8, 8, rng);
    for (Regularizer kind : {Regularizer::TotalVariation, Regularizer::Gradient}) {
      const LossGrad lg = regularizer_value_grad(x, kind, 1e-6);
      CHECK(gradient_check(x, lg.grad, [&](const CImage& p) { return regularizer_value_grad(p, kind, 1e-6).loss; }) <
            1e-4);
    }
  }
}

TEST_CASE("regulariser values") {
  const CImage flat = CImage::Constant(8, 8, cdouble(0.3, -0.2));
  CHECK(regularizer_value_grad(flat, Regularizer::TotalVariation, 1e-6).loss == doctest::Approx(64 * 1e-6));
  CHECK(regularizer_value_grad(flat, Regularizer::Gradient).loss == 0.0);

  CImage checker(8, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) checker(r, c) = (r + c) % 2 ? 1.0 : -1.0;
  const CImage same_energy = CImage::Constant(8, 8, 1.0);
  CHECK(regularizer_value_grad(checker, Regularizer::TotalVariation).loss >
        regularizer_value_grad(same_energy, Regularizer::TotalVariation).loss);
}

TEST_CASE("gradient descent") {
  const int n = 32;
  const Psf psf = blob_psf(n, 1.2);
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> pix(0, n - 1);
  CImage sigma = CImage::Zero(n, n);
  for (int k = 0; k < 12; ++k) sigma(pix(rng), pix(rng)) = 1.0;
  const ComplexImage img = fft_convolve(field_of(sigma, psf), psf);

  SUBCASE("zero iterations return the initialisation") {
    GdConfig cfg;
    cfg.iterations = 0;
    const DeconvResult r = gd_deconvolve(img, psf, cfg);
    CHECK(rel_err(r.field.data, cfg.init_scale * img.data / img.data.cwiseAbs().maxCoeff()) < 1e-15);
    CHECK(r.loss_trace.size() == 1);
  }
  SUBCASE("noiseless data converges") {
    GdConfig cfg;
    cfg.iterations = 5000;
    const DeconvResult r = gd_deconvolve(img, psf, cfg);
    const double best = *std::min_element(r.loss_trace.begin(), r.loss_trace.end());
    CHECK(best < 1e-4 * r.loss_trace.front());
    CHECK(datafit_grad(r.field, psf, img).loss == doctest::Approx(best));
  }
  SUBCASE("real-only runs stay real") {
    GdConfig cfg;
    cfg.iterations = 50;
    cfg.real_only = true;
    CHECK(gd_deconvolve(img, psf, cfg).field.data.imag().cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("strong TV flattens the field") {
    const Psf small = blob_psf(16, 1.0);
    std::mt19937_64 r2(9);
    const ComplexImage noisy = image_of(random_cimage(16, 16, r2), small);
    GdConfig cfg;
    cfg.iterations = 2000;
    cfg.regularizer = Regularizer::TotalVariation;
    cfg.reg_weight = 1e3 * ConvolutionOperator(small).norm_squared();
    const CImage x = gd_deconvolve(noisy, small, cfg).field.data;
    const cdouble mean = x.mean();
    const CImage ls = wiener(noisy, small, 1e-3 * ConvolutionOperator(small).norm_squared()).data;
    CHECK((x.array() - mean).matrix().norm() < 0.05 * (ls.array() - ls.mean()).matrix().norm());
  }
  SUBCASE("a runaway step raises Diverged with the trace") {
    GdConfig cfg;
    cfg.learning_rate = 1e4;
    cfg.iterations = 200;
    try {
      gd_deconvolve(img, psf, cfg);
      FAIL("expected divergence");
    } catch (const Diverged& e) {
      CHECK(e.trace().size() >= 2);
    }
  }
  SUBCASE("invalid configuration") {
    GdConfig cfg;
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(gd_deconvolve(img, psf, cfg), InvalidArgument);
  }
}

TEST_CASE("BREMEN fits real scenes and misses imaginary ones") {
  const Waveform w = lfm_chirp(30e3, 10e3, 1e-3, 100e3);
  const SceneGrid grid = build_grid(32, 0.062, 0.0);
  const TransducerRing ring = build_ring(1, 1, 180);
  const Psf psf = normalized(simulate_psf(ring, grid, w, 343.0));
  RealImage sigma(32, 32);
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c) sigma(r, c) = 0.5 + 0.5 * std::sin(0.7 * r + 0.3 * c);
  // Convolution-model data: the DAS image of an extended scene also carries the
  // shift-variant part of the PSF, which no shift-invariant fit can remove.
  const auto image = [&](double phase) {
    return fft_convolve(ComplexField{std::polar(1.0, phase) * sigma.cast<cdouble>(), grid}, psf);
  };
  const double relax = 0.5 * bremen_relaxation_limit(psf);
  ConvolutionOperator re_op(psf.image.data.real().cast<cdouble>(), psf.center_row, psf.center_col);
  const ConvolutionOperator op(psf);

  const ComplexImage real_img = image(0.0);
  const DeconvResult fit = bremen_deconvolve(real_img, psf, relax, 500);
  CHECK(fit.field.data.imag().cwiseAbs().maxCoeff() == 0.0);
  CHECK(fit.field.data.real().minCoeff() >= 0.0);
  const CImage re_target = real_img.data.real().cast<cdouble>();
  CHECK((re_op.apply(fit.field.data) - re_target).squaredNorm() < 0.1 * re_target.squaredNorm());

  const ComplexImage imag_img = image(M_PI / 2);
  const DeconvResult miss = bremen_deconvolve(imag_img, psf, relax, 500);
  CHECK((op.apply(miss.field.data) - imag_img.data).squaredNorm() > 0.5 * imag_img.data.squaredNorm());

  CHECK(bremen_deconvolve(real_img, psf, relax, 0).field.data.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(bremen_deconvolve(real_img, psf, 0.0, 10), InvalidArgument);
  CHECK_THROWS_AS(bremen_deconvolve(real_img, psf, 2.5 * bremen_relaxation_limit(psf), 10), InvalidArgument);
}
