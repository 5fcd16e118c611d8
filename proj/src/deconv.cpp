#include "csas/deconv.hpp"

#include <cmath>

#include "csas/fft.hpp"

namespace csas {

namespace {

void check_shapes(const CImage& a, Eigen::Index n, const char* what) {
  require(a.rows() == n && a.cols() == n, std::string(what) + ": size mismatch with PSF");
}

inline Eigen::Index wrap(Eigen::Index i, Eigen::Index n) { return i == n ? 0 : i; }

void differences(const CImage& x, CImage& dx, CImage& dy) {
  const Eigen::Index R = x.rows(), C = x.cols();
  dx.resize(R, C);
  dy.resize(R, C);
  for (Eigen::Index c = 0; c < C; ++c)
    for (Eigen::Index r = 0; r < R; ++r) {
      dx(r, c) = x(r, wrap(c + 1, C)) - x(r, c);
      dy(r, c) = x(wrap(r + 1, R), c) - x(r, c);
    }
}

// Adjoint of the forward differences applied to (px, py).
CImage differences_adjoint(const CImage& px, const CImage& py) {
  const Eigen::Index R = px.rows(), C = px.cols();
  CImage out(R, C);
  for (Eigen::Index c = 0; c < C; ++c)
    for (Eigen::Index r = 0; r < R; ++r)
      out(r, c) = px(r, c == 0 ? C - 1 : c - 1) - px(r, c) + py(r == 0 ? R - 1 : r - 1, c) - py(r, c);
  return out;
}

}  // namespace

ConvolutionOperator::ConvolutionOperator(const Psf& psf)
    : ConvolutionOperator(psf.image.data, psf.center_row, psf.center_col) {}

ConvolutionOperator::ConvolutionOperator(const CImage& kernel, Eigen::Index center_row, Eigen::Index center_col) {
  require(kernel.rows() == kernel.cols() && kernel.rows() > 0, "ConvolutionOperator: kernel must be square");
  spectrum_ = fft::fft2<double>(fft::circshift(kernel, -center_row, -center_col));
  norm_sq_ = spectrum_.cwiseAbs2().maxCoeff();
}

CImage ConvolutionOperator::apply(const CImage& x) const {
  check_shapes(x, size(), "convolve");
  CImage spec = fft::fft2<double>(x);
  spec.array() *= spectrum_.array();
  return fft::ifft2<double>(spec);
}

CImage ConvolutionOperator::adjoint(const CImage& y) const {
  check_shapes(y, size(), "correlate");
  CImage spec = fft::fft2<double>(y);
  spec.array() *= spectrum_.array().conjugate();
  return fft::ifft2<double>(spec);
}

ComplexImage fft_convolve(const ComplexField& field, const Psf& psf) {
  check_shapes(field.data, psf.image.data.rows(), "fft_convolve");
  return ComplexImage{ConvolutionOperator(psf).apply(field.data), field.grid};
}

ComplexField inverse_filter(const ComplexImage& image, const Psf& psf, double eps) {
  require(eps > 0.0, "inverse_filter: eps must be positive");
  const ConvolutionOperator op(psf);
  check_shapes(image.data, op.size(), "inverse_filter");
  const double cutoff = eps * std::sqrt(op.norm_squared());
  CImage spec = fft::fft2<double>(image.data);
  const CImage& k = op.spectrum();
  for (Eigen::Index i = 0; i < spec.size(); ++i) spec(i) = std::abs(k(i)) < cutoff ? 0.0 : spec(i) / k(i);
  return ComplexField{fft::ifft2<double>(spec), image.grid};
}

ComplexField wiener(const ComplexImage& image, const Psf& psf, double alpha) {
  require(alpha >= 0.0, "wiener: alpha must be non-negative");
  const ConvolutionOperator op(psf);
  check_shapes(image.data, op.size(), "wiener");
  CImage spec = fft::fft2<double>(image.data);
  const CImage& k = op.spectrum();
  for (Eigen::Index i = 0; i < spec.size(); ++i) {
    const double den = std::norm(k(i)) + alpha;
    spec(i) = den > 0.0 ? std::conj(k(i)) * spec(i) / den : 0.0;
  }
  return ComplexField{fft::ifft2<double>(spec), image.grid};
}

LossGrad datafit_grad(const CImage& x, const ConvolutionOperator& op, const CImage& image) {
  const CImage residual = op.apply(x) - image;
  return LossGrad{residual.squaredNorm(), 2.0 * op.adjoint(residual)};
}

LossGrad datafit_grad(const ComplexField& field, const Psf& psf, const ComplexImage& image) {
  return datafit_grad(field.data, ConvolutionOperator(psf), image.data);
}

LossGrad regularizer_value_grad(const CImage& field, Regularizer kind, double eps_tv) {
  LossGrad out;
  if (kind == Regularizer::None) {
    out.grad = CImage::Zero(field.rows(), field.cols());
    return out;
  }
  CImage dx, dy;
  differences(field, dx, dy);
  if (kind == Regularizer::Gradient) {
    out.loss = dx.squaredNorm() + dy.squaredNorm();
    out.grad = 2.0 * differences_adjoint(dx, dy);
    return out;
  }
  require(eps_tv > 0.0, "regularizer_value_grad: eps_tv must be positive");
  const Eigen::ArrayXXd mag =
      (dx.array().abs2() + dy.array().abs2() + eps_tv * eps_tv).sqrt();
  out.loss = mag.sum();
  const CImage px = (dx.array() / mag).matrix();
  const CImage py = (dy.array() / mag).matrix();
  out.grad = differences_adjoint(px, py);
  return out;
}

DeconvResult gd_deconvolve(const ComplexImage& image, const Psf& psf, const GdConfig& cfg) {
  require(cfg.learning_rate > 0.0, "gd_deconvolve: learning rate must be positive");
  require(cfg.momentum >= 0.0 && cfg.momentum < 1.0, "gd_deconvolve: momentum must lie in [0, 1)");
  require(cfg.iterations >= 0, "gd_deconvolve: iteration count must be non-negative");
  require(cfg.reg_weight >= 0.0, "gd_deconvolve: regularisation weight must be non-negative");

  const ConvolutionOperator op(psf);
  check_shapes(image.data, op.size(), "gd_deconvolve");
  const double beta = cfg.regularizer == Regularizer::None ? 0.0 : cfg.reg_weight;

  const double peak = image.data.cwiseAbs().maxCoeff();
  CImage x = peak > 0.0 ? CImage(cfg.init_scale / peak * image.data)
                        : CImage(CImage::Zero(image.data.rows(), image.data.cols()));
  if (cfg.real_only) x = x.real().cast<cdouble>();

  auto evaluate = [&](const CImage& field, double& data, double& objective) {
    LossGrad fit = datafit_grad(field, op, image.data);
    data = fit.loss;
    objective = fit.loss;
    if (beta > 0.0) {
      const LossGrad reg = regularizer_value_grad(field, cfg.regularizer, cfg.eps_tv);
      objective += beta * reg.loss;
      fit.grad += beta * reg.grad;
    }
    if (cfg.real_only) fit.grad = fit.grad.real().cast<cdouble>();
    return fit.grad;
  };

  DeconvResult result;
  double data = 0.0, objective = 0.0;
  CImage grad = evaluate(x, data, objective);
  result.loss_trace.push_back(data);
  const double initial = objective;
  double best = objective;
  CImage best_x = x;

  const double curvature = 2.0 * op.norm_squared() + 16.0 * beta;
  double step = cfg.learning_rate / curvature;
  CImage velocity = CImage::Zero(x.rows(), x.cols());
  int stale = 0;

  for (int it = 1; it <= cfg.iterations; ++it) {
    velocity = cfg.momentum * velocity + grad;
    x -= step * velocity;
    double next_data = 0.0, next_obj = 0.0;
    grad = evaluate(x, next_data, next_obj);
    result.loss_trace.push_back(next_data);
    result.iterations_run = it;
    if (!std::isfinite(next_obj) || next_obj > 1e6 * std::max(initial, 1e-300))
      throw Diverged("gd_deconvolve: objective diverged at iteration " + std::to_string(it), result.loss_trace);
    if (next_obj < best) {
      best = next_obj;
      best_x = x;
      result.best_iteration = it;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      // Plateau: halve the step and resume from the best iterate.
      step *= 0.5;
      x = best_x;
      velocity.setZero();
      grad = evaluate(x, next_data, next_obj);
      stale = 0;
    }
  }
  result.field = ComplexField{best_x, image.grid};
  return result;
}

double bremen_relaxation_limit(const Psf& psf) {
  const CImage real_kernel = psf.image.data.real().cast<cdouble>();
  const ConvolutionOperator op(real_kernel, psf.center_row, psf.center_col);
  return 2.0 / std::sqrt(op.norm_squared());
}

DeconvResult bremen_deconvolve(const ComplexImage& image, const Psf& psf, double relaxation, int iterations) {
  const CImage real_kernel = psf.image.data.real().cast<cdouble>();
  const ConvolutionOperator op(real_kernel, psf.center_row, psf.center_col);
  check_shapes(image.data, op.size(), "bremen_deconvolve");
  require(relaxation > 0.0 && relaxation < 2.0 / std::sqrt(op.norm_squared()),
          "bremen_deconvolve: relaxation must lie in (0, 2 / max|K|)");
  require(iterations >= 0, "bremen_deconvolve: iteration count must be non-negative");

  const CImage target = image.data.real().cast<cdouble>();
  CImage s = CImage::Zero(target.rows(), target.cols());
  CImage residual = target - op.apply(s);

  DeconvResult result;
  result.loss_trace.push_back(residual.squaredNorm());
  double best = result.loss_trace.back();
  CImage best_s = s;
  for (int it = 1; it <= iterations; ++it) {
    s += relaxation * residual;
    s = s.real().cwiseMax(0.0).cast<cdouble>();
    residual = target - op.apply(s);
    const double loss = residual.squaredNorm();
    result.loss_trace.push_back(loss);
    result.iterations_run = it;
    if (loss < best) {
      best = loss;
      best_s = s;
      result.best_iteration = it;
    }
  }
  result.field = ComplexField{best_s, image.grid};
  return result;
}

}  // namespace csas
