#include "pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace csas::app {

namespace {

std::string meta_get(const Tensor& t, const std::string& key) {
  const auto it = t.metadata.find(key);
  if (it == t.metadata.end()) throw FormatError("tensor metadata lacks '" + key + "'");
  return it->second;
}

double meta_num(const Tensor& t, const std::string& key) {
  try {
    return parse_number(meta_get(t, key), key);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("tensor metadata: ") + e.what());
  }
}

}  // namespace

Setup make_setup(const RunConfig& cfg) {
  Setup s;
  s.scene.kind = parse_scene_kind(cfg.str("scene.kind"));
  s.scene.n = cfg.integer("scene.n");
  s.scene.extent = cfg.num("scene.extent");
  s.scene.z0 = cfg.num("scene.z0");
  s.scene.seed = cfg.seed("scene.seed");
  s.scene.count = cfg.integer("scene.count");
  s.scene.cells = cfg.integer("scene.cells");
  s.scene.base = parse_scene_base(cfg.str("scene.base"));
  s.scene.spacing = cfg.integer("scene.spacing");
  s.scene.support = cfg.num("scene.support");
  require(s.scene.n >= 2, "scene.n must be at least 2");
  require(s.scene.extent > 0.0, "scene.extent must be positive");

  s.ring = build_ring(cfg.num("ring.radius"), cfg.num("ring.height"), cfg.integer("ring.angles"));
  s.waveform = lfm_chirp(cfg.num("waveform.f_start"), cfg.num("waveform.f_stop"), cfg.num("waveform.duration"),
                         cfg.num("waveform.fs"));
  s.c = cfg.num("medium.c");
  require(s.c > 0.0, "medium.c must be positive");
  s.noise_db = cfg.num("noise.psnr_db");
  noise_variance_for_psnr(s.noise_db);  // validates
  s.noise_seed = cfg.seed("noise.seed");
  s.das.upsample = cfg.integer("beamform.upsample");
  require(s.das.upsample >= 1, "beamform.upsample must be >= 1");
  s.mask_fraction = cfg.num("eval.mask_radius");
  require(s.mask_fraction > 0.0, "eval.mask_radius must be positive");
  s.floor_db = cfg.num("output.floor_db");
  require(s.floor_db < 0.0, "output.floor_db must be negative");
  return s;
}

ScatterScene make_truth(const RunConfig& cfg, const Setup& s) {
  if (!cfg.str("scene.file").empty()) return scene_from_tensor(read_tensor(cfg.str("scene.file")));
  return generate_scene(s.scene);
}

PingSet simulate_pings(const Setup& s, const ScatterScene& scene) { return simulate_pings(s, scene, s.noise_db); }

PingSet simulate_pings(const Setup& s, const ScatterScene& scene, double noise_db) {
  PingSet clean = simulate(scene, s.ring, s.waveform, s.c);
  const double eta = noise_variance_for_psnr(noise_db);
  if (eta == 0.0) return clean;
  // PSNR is defined on pings scaled to unit peak, so the variance scales with peak^2.
  const double peak = clean.pings.cwiseAbs().maxCoeff();
  return simulate(scene, s.ring, s.waveform, s.c, eta * (peak > 0.0 ? peak * peak : 1.0), s.noise_seed);
}

ComplexImage beamform(const Setup& s, const PingSet& pings, const SceneGrid& grid) {
  ComplexImage img = das(prepare_pings(pings, s.waveform), grid, s.c, s.das);
  const double peak = img.data.cwiseAbs().maxCoeff();
  if (peak > 0.0) img.data /= peak;
  return img;
}

Psf make_psf(const RunConfig& cfg, const Setup& s, const SceneGrid& grid) {
  if (cfg.str("psf.file").empty()) return normalized(simulate_psf(s.ring, grid, s.waveform, s.c, s.das));
  const Tensor t = read_tensor(cfg.str("psf.file"));
  Psf psf;
  psf.image.data = to_cimage(t);
  if (psf.image.data.rows() != grid.n || psf.image.data.cols() != grid.n)
    throw InvalidArgument("psf.file: PSF size does not match scene.n");
  psf.image.grid = kernel_grid(grid);
  psf.f_start = s.waveform.f_start;
  psf.f_stop = s.waveform.f_stop;
  psf.center_row = psf.center_col = grid.n / 2;
  return normalized(psf);
}

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names = {"inverse", "wiener", "gd", "gd-tv", "gd-grad", "bremen", "sinr"};
  return names;
}

bool is_method(const std::string& name) {
  const auto& m = method_names();
  return std::find(m.begin(), m.end(), name) != m.end();
}

void check_method(const std::string& name) {
  if (is_method(name)) return;
  std::string valid;
  for (const auto& m : method_names()) valid += (valid.empty() ? "" : ", ") + m;
  throw ConfigError("unknown method '" + name + "' (valid methods: " + valid + ")");
}

GdConfig gd_config(const RunConfig& cfg) {
  GdConfig g;
  g.learning_rate = cfg.num("gd.learning_rate");
  g.momentum = cfg.num("gd.momentum");
  g.iterations = cfg.integer("gd.iterations");
  g.init_scale = cfg.num("gd.init_scale");
  g.patience = cfg.integer("gd.patience");
  g.eps_tv = cfg.num("gd.eps_tv");
  g.real_only = cfg.flag("gd.real_only");
  require(g.patience >= 1, "gd.patience must be positive");
  return g;
}

SinrConfig sinr_config(const RunConfig& cfg) {
  SinrConfig c;
  c.kappa = cfg.num("sinr.kappa");
  c.features = cfg.integer("sinr.features");
  c.hidden_width = cfg.integer("sinr.hidden_width");
  c.learning_rate = cfg.num("sinr.learning_rate");
  c.iterations = cfg.integer("sinr.iterations");
  c.seed = cfg.seed("sinr.seed");
  const std::string& p = cfg.str("sinr.precision");
  if (p == "float") c.precision = Precision::Float;
  else if (p == "double") c.precision = Precision::Double;
  else throw ConfigError("'sinr.precision': expected float or double, got '" + p + "'");
  return c;
}

DeconvResult run_method(const std::string& method, const RunConfig& cfg, const ComplexImage& image, const Psf& psf,
                        MlpParams<float>* trained) {
  check_method(method);
  const double knorm = ConvolutionOperator(psf).norm_squared();
  DeconvResult r;
  if (method == "inverse" || method == "wiener") {
    r.field = method == "inverse" ? inverse_filter(image, psf, cfg.num("inverse.eps"))
                                  : wiener(image, psf, cfg.num("wiener.alpha") * knorm);
    r.loss_trace.push_back(datafit_grad(r.field, psf, image).loss);
    return r;
  }
  if (method == "bremen") {
    return bremen_deconvolve(image, psf, cfg.num("bremen.relaxation") * bremen_relaxation_limit(psf),
                             cfg.integer("bremen.iterations"));
  }
  if (method == "sinr") return sinr_deconvolve(image, psf, sinr_config(cfg), trained);

  GdConfig g = gd_config(cfg);
  if (method == "gd-tv") {
    g.regularizer = Regularizer::TotalVariation;
    g.reg_weight = cfg.num("gd.tv_weight") * knorm;
  } else if (method == "gd-grad") {
    g.regularizer = Regularizer::Gradient;
    g.reg_weight = cfg.num("gd.grad_weight") * knorm;
  }
  return gd_deconvolve(image, psf, g);
}

std::array<double, 4> quadrant_residuals(const ConvolutionOperator& op, const CImage& field, const CImage& image) {
  const CImage r = op.apply(field) - image;
  const Eigen::Index h = r.rows() / 2;
  std::array<double, 4> q{};
  for (Eigen::Index c = 0; c < r.cols(); ++c)
    for (Eigen::Index row = 0; row < r.rows(); ++row) q[(row >= h) * 2 + (c >= h)] += std::norm(r(row, c));
  return q;
}

QuadrantReport quadrant_experiment(const ComplexImage& image, const Psf& psf, GdConfig gd) {
  const ConvolutionOperator op(psf);
  QuadrantReport rep;
  gd.real_only = false;
  rep.complex_run = gd_deconvolve(image, psf, gd);
  gd.real_only = true;
  rep.real_run = gd_deconvolve(image, psf, gd);
  rep.zero = quadrant_residuals(op, CImage::Zero(image.data.rows(), image.data.cols()), image.data);
  rep.complex = quadrant_residuals(op, rep.complex_run.field.data, image.data);
  rep.real = quadrant_residuals(op, rep.real_run.field.data, image.data);
  for (int q = 0; q < 4; ++q) {
    rep.complex_total += rep.complex[q];
    rep.real_total += rep.real[q];
  }
  return rep;
}

Metadata setup_metadata(const Setup& s) {
  Metadata m;
  m["fs"] = format_double(s.waveform.fs);
  m["f_start"] = format_double(s.waveform.f_start);
  m["f_stop"] = format_double(s.waveform.f_stop);
  m["duration"] = format_double(s.waveform.duration);
  m["c"] = format_double(s.c);
  m["extent"] = format_double(s.scene.extent);
  m["z0"] = format_double(s.scene.z0);
  m["n"] = std::to_string(s.scene.n);
  m["seed"] = std::to_string(s.scene.seed);
  m["ring_radius"] = format_double(s.ring.radius);
  m["ring_height"] = format_double(s.ring.height);
  m["ring_angles"] = std::to_string(s.ring.size());
  return m;
}

Tensor scene_tensor(const ScatterScene& scene, const Setup& s) {
  Metadata m = setup_metadata(s);
  m["kind"] = to_string(s.scene.kind);
  m["n"] = std::to_string(scene.grid.n);
  m["extent"] = format_double(scene.grid.extent);
  m["z0"] = format_double(scene.grid.z0);
  return to_tensor(scene.reflectivity(), std::move(m));
}

ScatterScene scene_from_tensor(const Tensor& t) {
  const CImage refl = to_cimage(t);
  if (refl.rows() != refl.cols()) throw FormatError("scene file: reflectivity must be square");
  const SceneGrid grid = build_grid(static_cast<int>(refl.rows()), meta_num(t, "extent"), meta_num(t, "z0"));
  RealImage sigma = refl.cwiseAbs();
  if ((refl.imag().array() == 0.0).all() && (refl.real().array() >= 0.0).all()) return make_scene(grid, sigma);
  RealImage phase(refl.rows(), refl.cols());
  for (Eigen::Index i = 0; i < refl.size(); ++i) phase(i) = std::arg(refl(i));
  return make_scene(grid, std::move(sigma), std::move(phase));
}

Tensor pings_tensor(const PingSet& pings, const Setup& s) {
  Metadata m = setup_metadata(s);
  m["t0"] = format_double(pings.t0);
  m["fs"] = format_double(pings.fs);
  m["noise_psnr_db"] = format_double(s.noise_db);
  m["noise_seed"] = std::to_string(s.noise_seed);
  Tensor t = to_tensor(RealImage(pings.pings), std::move(m));
  return t;
}

PingSet pings_from_tensor(const Tensor& t) {
  PingSet p;
  p.pings = to_real_image(t);
  p.fs = meta_num(t, "fs");
  p.t0 = meta_num(t, "t0");
  p.ring = build_ring(meta_num(t, "ring_radius"), meta_num(t, "ring_height"),
                      static_cast<int>(meta_num(t, "ring_angles")));
  if (p.ring.size() != static_cast<std::size_t>(p.pings.rows()))
    throw FormatError("pings file: row count does not match ring_angles");
  return p;
}

}  // namespace csas::app
