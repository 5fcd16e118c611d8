#include "csas/inr.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "csas/io.hpp"
#include "csas/simulator.hpp"

namespace csas {

namespace {

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Activations of one forward pass. pre[l] is the pre-activation of layer l,
// post[l] the input to layer l (post[0] is the feature matrix, 2M x P).
template <class Scalar>
struct Tape {
  std::vector<Mat<Scalar>> pre;
  std::vector<Mat<Scalar>> post;
};

template <class Scalar>
void check_params(const MlpParams<Scalar>& p, Eigen::Index input_dim) {
  require(p.layers() >= 1 && p.biases.size() == p.layers(), "mlp: malformed parameter set");
  require(p.weights.front().cols() == input_dim, "mlp: feature dimension does not match the first layer");
  for (std::size_t l = 0; l < p.layers(); ++l) {
    require(p.biases[l].size() == p.weights[l].rows(), "mlp: bias shape does not match its layer");
    if (l > 0) require(p.weights[l].cols() == p.weights[l - 1].rows(), "mlp: layer shapes do not chain");
  }
  require(p.weights.back().rows() == 2, "mlp: output layer must have two channels");
}

template <class Scalar>
Mat<Scalar> transposed_features(const Eigen::MatrixXd& features) {
  return features.transpose().cast<Scalar>();
}

template <class Scalar>
Mat<Scalar> forward(const MlpParams<Scalar>& p, const Mat<Scalar>& input, Tape<Scalar>* tape) {
  Mat<Scalar> a = input;
  if (tape) {
    tape->pre.clear();
    tape->post.clear();
  }
  for (std::size_t l = 0; l < p.layers(); ++l) {
    Mat<Scalar> z = p.weights[l] * a;
    z.colwise() += p.biases[l];
    const bool last = l + 1 == p.layers();
    if (tape) {
      tape->post.push_back(std::move(a));
      tape->pre.push_back(z);
    }
    a = last ? std::move(z) : Mat<Scalar>(z.cwiseMax(Scalar(0)));
  }
  return a;
}

CImage to_field(const auto& out, int n) {
  require(out.cols() == static_cast<Eigen::Index>(n) * n, "mlp: pixel count does not match the grid");
  CImage field(n, n);
  for (Eigen::Index i = 0; i < out.cols(); ++i)
    field(i) = cdouble(static_cast<double>(out(0, i)), static_cast<double>(out(1, i)));
  return field;
}

template <class Scalar>
SinrGradient<Scalar> loss_backward(const MlpParams<Scalar>& p, const Mat<Scalar>& input, const ConvolutionOperator& op,
                                   const CImage& image, int iteration) {
  const int n = static_cast<int>(op.size());
  Tape<Scalar> tape;
  const Mat<Scalar> out = forward(p, input, &tape);
  const CImage residual = op.apply(to_field(out, n)) - image;

  SinrGradient<Scalar> g;
  g.loss = residual.squaredNorm();
  if (!std::isfinite(g.loss)) throw NumericOverflow("sinr: loss is not finite", iteration);

  const CImage dfield = 2.0 * op.adjoint(residual);
  Mat<Scalar> dz(2, out.cols());
  for (Eigen::Index i = 0; i < out.cols(); ++i) {
    dz(0, i) = static_cast<Scalar>(dfield(i).real());
    dz(1, i) = static_cast<Scalar>(dfield(i).imag());
  }
  g.grads.weights.resize(p.layers());
  g.grads.biases.resize(p.layers());
  for (std::size_t l = p.layers(); l-- > 0;) {
    g.grads.weights[l].noalias() = dz * tape.post[l].transpose();
    g.grads.biases[l] = dz.rowwise().sum();
    if (l == 0) break;
    Mat<Scalar> da = p.weights[l].transpose() * dz;
    dz = (tape.pre[l - 1].array() > Scalar(0)).select(da, Scalar(0));
  }
  return g;
}

}  // namespace

FourierEncoding make_fourier_encoding(int features, double kappa, std::uint64_t seed) {
  require(features >= 1, "fourier encoding: feature count must be positive");
  require(kappa > 0.0, "fourier encoding: kappa must be positive");
  std::mt19937_64 rng(mix_seed(seed, 0xb0));
  std::normal_distribution<double> gauss(0.0, 1.0);
  FourierEncoding enc;
  enc.kappa = kappa;
  enc.b_matrix.resize(features, 2);
  for (int m = 0; m < features; ++m)
    for (int d = 0; d < 2; ++d) enc.b_matrix(m, d) = gauss(rng);
  return enc;
}

Eigen::MatrixXd grid_coordinates(int n) {
  require(n >= 1, "grid_coordinates: n must be positive");
  Eigen::MatrixXd z(static_cast<Eigen::Index>(n) * n, 2);
  const double scale = n > 1 ? 2.0 / (n - 1) : 0.0;
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) {
      const Eigen::Index p = r + static_cast<Eigen::Index>(c) * n;
      z(p, 0) = n > 1 ? -1.0 + scale * c : 0.0;
      z(p, 1) = n > 1 ? -1.0 + scale * r : 0.0;
    }
  return z;
}

Eigen::MatrixXd encode(const Eigen::MatrixXd& coords, const FourierEncoding& enc) {
  require(coords.cols() == 2, "encode: coordinates must have two columns");
  const Eigen::Index m = enc.features();
  const Eigen::MatrixXd proj = (2.0 * std::numbers::pi * enc.kappa) * (coords * enc.b_matrix.transpose());
  Eigen::MatrixXd out(coords.rows(), 2 * m);
  out.leftCols(m) = proj.array().cos().matrix();
  out.rightCols(m) = proj.array().sin().matrix();
  return out;
}

template <class Scalar>
std::size_t MlpParams<Scalar>::parameter_count() const {
  std::size_t total = 0;
  for (std::size_t l = 0; l < layers(); ++l) total += weights[l].size() + biases[l].size();
  return total;
}

template <class Scalar>
MlpParams<Scalar> MlpParams<Scalar>::zeros_like() const {
  MlpParams out;
  for (std::size_t l = 0; l < layers(); ++l) {
    out.weights.push_back(Matrix::Zero(weights[l].rows(), weights[l].cols()));
    out.biases.push_back(Vector::Zero(biases[l].size()));
  }
  return out;
}

template <class Scalar>
MlpParams<Scalar> init_mlp(Eigen::Index input_dim, Eigen::Index hidden, std::uint64_t seed, int layers) {
  require(input_dim >= 1 && hidden >= 1, "init_mlp: layer widths must be positive");
  require(layers >= 1, "init_mlp: need at least one layer");
  MlpParams<Scalar> p;
  for (int l = 0; l < layers; ++l) {
    const Eigen::Index in = l == 0 ? input_dim : hidden;
    const Eigen::Index out = l + 1 == layers ? 2 : hidden;
    const double bound = std::sqrt(1.0 / static_cast<double>(in));
    std::mt19937_64 rng(mix_seed(seed, 0x1a7e0 + static_cast<std::uint64_t>(l)));
    std::uniform_real_distribution<double> uni(-bound, bound);
    typename MlpParams<Scalar>::Matrix w(out, in);
    for (Eigen::Index c = 0; c < in; ++c)
      for (Eigen::Index r = 0; r < out; ++r) w(r, c) = static_cast<Scalar>(uni(rng));
    p.weights.push_back(std::move(w));
    p.biases.push_back(MlpParams<Scalar>::Vector::Zero(out));
  }
  return p;
}

template <class Scalar>
CImage mlp_forward(const MlpParams<Scalar>& params, const Eigen::MatrixXd& features, int n) {
  check_params(params, features.cols());
  return to_field(forward<Scalar>(params, transposed_features<Scalar>(features), nullptr), n);
}

template <class Scalar>
SinrGradient<Scalar> sinr_loss_backward(const MlpParams<Scalar>& params, const Eigen::MatrixXd& features,
                                        const ConvolutionOperator& op, const CImage& image, int iteration) {
  check_params(params, features.cols());
  require(image.rows() == op.size() && image.cols() == op.size(), "sinr: image does not match the PSF size");
  return loss_backward<Scalar>(params, transposed_features<Scalar>(features), op, image, iteration);
}

namespace {

template <class Scalar>
DeconvResult train(const ComplexImage& image, const Psf& psf, const SinrConfig& cfg, MlpParams<Scalar>* trained) {
  const ConvolutionOperator op(psf);
  const int n = static_cast<int>(op.size());
  require(image.data.rows() == n && image.data.cols() == n, "sinr_deconvolve: image does not match the PSF size");

  const double peak = image.data.cwiseAbs().maxCoeff();
  const double scale = peak > 0.0 ? peak : 1.0;
  const CImage target = image.data / scale;

  const FourierEncoding enc = make_fourier_encoding(cfg.features, cfg.kappa, cfg.seed);
  const Mat<Scalar> input = transposed_features<Scalar>(encode(grid_coordinates(n), enc));
  MlpParams<Scalar> p = init_mlp<Scalar>(2 * cfg.features, cfg.hidden_width, cfg.seed);
  MlpParams<Scalar> m = p.zeros_like(), v = p.zeros_like();
  MlpParams<Scalar> best = p;

  DeconvResult result;
  const double units = scale * scale;
  double best_loss = std::numeric_limits<double>::infinity();
  double initial = 0.0;
  const auto lr = static_cast<Scalar>(cfg.learning_rate);
  const auto b1 = static_cast<Scalar>(cfg.beta1), b2 = static_cast<Scalar>(cfg.beta2);
  const auto eps = static_cast<Scalar>(cfg.adam_eps);

  for (int it = 0;; ++it) {
    SinrGradient<Scalar> g;
    try {
      g = loss_backward<Scalar>(p, input, op, target, it);
    } catch (const NumericOverflow& e) {
      throw Diverged(std::string("sinr_deconvolve: ") + e.what(), result.loss_trace);
    }
    result.loss_trace.push_back(g.loss * units);
    if (it == 0) initial = g.loss;
    if (g.loss > 1e6 * std::max(initial, 1e-300))
      throw Diverged("sinr_deconvolve: loss diverged at iteration " + std::to_string(it), result.loss_trace);
    if (g.loss < best_loss) {
      best_loss = g.loss;
      best = p;
      result.best_iteration = it;
    }
    if (it == cfg.iterations) break;

    // Adam with bias correction.
    const Scalar c1 = Scalar(1) - static_cast<Scalar>(std::pow(cfg.beta1, it + 1));
    const Scalar c2 = Scalar(1) - static_cast<Scalar>(std::pow(cfg.beta2, it + 1));
    auto step = [&](auto& param, auto& mom, auto& var, const auto& grad) {
      mom = b1 * mom + (Scalar(1) - b1) * grad;
      var = b2 * var.array() + (Scalar(1) - b2) * grad.array().square();
      param.array() -= lr * (mom.array() / c1) / ((var.array() / c2).sqrt() + eps);
    };
    for (std::size_t l = 0; l < p.layers(); ++l) {
      step(p.weights[l], m.weights[l], v.weights[l], g.grads.weights[l]);
      step(p.biases[l], m.biases[l], v.biases[l], g.grads.biases[l]);
    }
    result.iterations_run = it + 1;
  }

  result.field = ComplexField{to_field(forward<Scalar>(best, input, nullptr), n) * scale, image.grid};
  if (trained) *trained = std::move(best);
  return result;
}

}  // namespace

DeconvResult sinr_deconvolve(const ComplexImage& image, const Psf& psf, const SinrConfig& cfg,
                             MlpParams<float>* trained) {
  require(cfg.kappa > 0.0, "sinr: kappa must be positive");
  require(cfg.features >= 1 && cfg.hidden_width >= 1, "sinr: layer sizes must be positive");
  require(cfg.learning_rate > 0.0, "sinr: learning rate must be positive");
  require(cfg.iterations >= 0, "sinr: iteration count must be non-negative");
  if (cfg.precision == Precision::Double) {
    MlpParams<double> p;
    DeconvResult r = train<double>(image, psf, cfg, trained ? &p : nullptr);
    if (trained) {
      trained->weights.clear();
      trained->biases.clear();
      for (std::size_t l = 0; l < p.layers(); ++l) {
        trained->weights.push_back(p.weights[l].cast<float>());
        trained->biases.push_back(p.biases[l].cast<float>());
      }
    }
    return r;
  }
  return train<float>(image, psf, cfg, trained);
}

void save_checkpoint(const std::string& path, const MlpParams<float>& params, const FourierEncoding& enc,
                     const SinrConfig& cfg) {
  Tensor t;
  t.dtype = DType::F32Real;
  std::vector<float> flat;
  std::ostringstream shapes;
  auto append = [&](const auto& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) flat.push_back(static_cast<float>(m(r, c)));
  };
  append(enc.b_matrix);
  for (std::size_t l = 0; l < params.layers(); ++l) {
    append(params.weights[l]);
    append(params.biases[l]);
    shapes << (l ? "," : "") << params.weights[l].rows() << 'x' << params.weights[l].cols();
  }
  t.dims = {static_cast<std::uint32_t>(flat.size())};
  t.values.assign(flat.begin(), flat.end());
  t.metadata["kind"] = "sinr-checkpoint";
  t.metadata["layers"] = shapes.str();
  t.metadata["features"] = std::to_string(enc.features());
  t.metadata["kappa"] = format_double(enc.kappa);
  t.metadata["hidden_width"] = std::to_string(cfg.hidden_width);
  t.metadata["learning_rate"] = format_double(cfg.learning_rate);
  t.metadata["iterations"] = std::to_string(cfg.iterations);
  t.metadata["seed"] = std::to_string(cfg.seed);
  write_tensor(path, t);
}

Checkpoint load_checkpoint(const std::string& path) {
  const Tensor t = read_tensor(path);
  auto field = [&](const std::string& key) {
    const auto it = t.metadata.find(key);
    if (it == t.metadata.end()) throw FormatError("checkpoint: missing metadata key '" + key + "'");
    return it->second;
  };
  if (field("kind") != "sinr-checkpoint") throw FormatError("checkpoint: not a network checkpoint");
  Checkpoint ck;
  const int m = std::stoi(field("features"));
  ck.enc.kappa = std::stod(field("kappa"));
  std::size_t pos = 0;
  auto take = [&](auto& mat) {
    if (pos + static_cast<std::size_t>(mat.size()) > t.values.size())
      throw FormatError("checkpoint: payload shorter than the recorded layer shapes");
    for (Eigen::Index c = 0; c < mat.cols(); ++c)
      for (Eigen::Index r = 0; r < mat.rows(); ++r) mat(r, c) = static_cast<float>(t.values[pos++].real());
  };
  Eigen::MatrixXf b(m, 2);
  take(b);
  ck.enc.b_matrix = b.cast<double>();
  std::istringstream shapes(field("layers"));
  std::string item;
  while (std::getline(shapes, item, ',')) {
    const auto x = item.find('x');
    if (x == std::string::npos) throw FormatError("checkpoint: malformed layer shape '" + item + "'");
    MlpParams<float>::Matrix w(std::stol(item.substr(0, x)), std::stol(item.substr(x + 1)));
    MlpParams<float>::Vector bias(w.rows());
    take(w);
    take(bias);
    ck.params.weights.push_back(std::move(w));
    ck.params.biases.push_back(std::move(bias));
  }
  if (pos != t.values.size()) throw FormatError("checkpoint: trailing payload");
  return ck;
}

template struct MlpParams<float>;
template struct MlpParams<double>;
template MlpParams<float> init_mlp<float>(Eigen::Index, Eigen::Index, std::uint64_t, int);
template MlpParams<double> init_mlp<double>(Eigen::Index, Eigen::Index, std::uint64_t, int);
template CImage mlp_forward<float>(const MlpParams<float>&, const Eigen::MatrixXd&, int);
template CImage mlp_forward<double>(const MlpParams<double>&, const Eigen::MatrixXd&, int);
template SinrGradient<float> sinr_loss_backward<float>(const MlpParams<float>&, const Eigen::MatrixXd&,
                                                       const ConvolutionOperator&, const CImage&, int);
template SinrGradient<double> sinr_loss_backward<double>(const MlpParams<double>&, const Eigen::MatrixXd&,
                                                         const ConvolutionOperator&, const CImage&, int);

}  // namespace csas
