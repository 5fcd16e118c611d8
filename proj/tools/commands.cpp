#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "csas/metrics.hpp"
#include "csas/parallel.hpp"
#include "pipeline.hpp"

namespace csas::app {

namespace fs = std::filesystem;

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) {
  const fs::path p = fs::path(cfg.str("output.dir")) / name;
  std::error_code ec;
  fs::create_directories(p.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + p.parent_path().string() + "': " + ec.message());
  return p.string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out.flush()) throw IoError("failed writing '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void emit(std::ostream& log, const std::string& path) { log << "wrote " << path << "\n"; }

Metadata grid_metadata(const Setup& s, const SceneGrid& grid) {
  Metadata m = setup_metadata(s);
  m["n"] = std::to_string(grid.n);
  m["extent"] = format_double(grid.extent);
  m["z0"] = format_double(grid.z0);
  return m;
}

ComplexImage image_from_tensor(const Tensor& t) {
  ComplexImage img;
  img.data = to_cimage(t);
  if (img.data.rows() != img.data.cols()) throw FormatError("image file: expected a square image");
  const auto num = [&](const char* key) {
    const auto it = t.metadata.find(key);
    if (it == t.metadata.end()) throw FormatError(std::string("image file metadata lacks '") + key + "'");
    return parse_number(it->second, key);
  };
  img.grid = build_grid(static_cast<int>(img.data.rows()), num("extent"), num("z0"));
  const double peak = img.data.cwiseAbs().maxCoeff();
  if (peak > 0.0) img.data /= peak;
  return img;
}

std::string loss_csv(const std::vector<double>& trace) {
  std::string s = "iteration,loss\n";
  for (std::size_t i = 0; i < trace.size(); ++i) s += std::to_string(i) + "," + format_double(trace[i]) + "\n";
  return s;
}

std::string scene_name(const RunConfig& cfg, const Setup& s) {
  return cfg.str("scene.file").empty() ? to_string(s.scene.kind) : fs::path(cfg.str("scene.file")).stem().string();
}

/// Ground truth (when known) and the normalised DAS image it produces, or an
/// image supplied directly through deconv.image / beamform.pings.
struct Acquisition {
  std::optional<ScatterScene> truth;
  ComplexImage image;
};

Acquisition acquire(const RunConfig& cfg, const Setup& s, const std::string& image_key) {
  Acquisition a;
  const bool from_image = !image_key.empty() && !cfg.str(image_key).empty();
  const bool from_pings = !from_image && !cfg.str("beamform.pings").empty();
  if (!cfg.str("scene.file").empty() || (!from_image && !from_pings)) a.truth = make_truth(cfg, s);
  if (from_image) {
    a.image = image_from_tensor(read_tensor(cfg.str(image_key)));
  } else {
    const SceneGrid grid = a.truth ? a.truth->grid : build_grid(s.scene.n, s.scene.extent, s.scene.z0);
    const PingSet pings = from_pings ? pings_from_tensor(read_tensor(cfg.str("beamform.pings")))
                                     : simulate_pings(s, *a.truth);
    a.image = beamform(s, pings, grid);
  }
  if (a.truth && a.truth->grid.n != a.image.grid.n)
    throw InvalidArgument("scene and image sizes differ (" + std::to_string(a.truth->grid.n) + " vs " +
                          std::to_string(a.image.grid.n) + ")");
  return a;
}

double mask_radius(const Setup& s, int n) { return s.mask_fraction * n; }

std::string sanitize(std::string s) {
  for (char& ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-') ch = '_';
  return s;
}

}  // namespace

void cmd_scene_gen(const RunConfig& cfg, std::ostream& log) {
  const Setup s = make_setup(cfg);
  const ScatterScene scene = make_truth(cfg, s);
  const std::string path = out_path(cfg, "scene.csas");
  write_tensor(path, scene_tensor(scene, s));
  emit(log, path);
  const std::string png = out_path(cfg, "scene.png");
  export_png(ComplexImage{scene.reflectivity(), scene.grid}, s.floor_db, png);
  emit(log, png);
}

void cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const Setup s = make_setup(cfg);
  const ScatterScene scene = make_truth(cfg, s);
  const PingSet pings = simulate_pings(s, scene);
  const std::string scene_path = out_path(cfg, "scene.csas");
  write_tensor(scene_path, scene_tensor(scene, s));
  emit(log, scene_path);
  const std::string path = out_path(cfg, "pings.csas");
  write_tensor(path, pings_tensor(pings, s));
  emit(log, path);
}

void cmd_psf(const RunConfig& cfg, std::ostream& log) {
  const Setup s = make_setup(cfg);
  const SceneGrid grid = build_grid(s.scene.n, s.scene.extent, s.scene.z0);
  const Psf psf = make_psf(cfg, s, grid);
  Metadata m = grid_metadata(s, grid);
  m["center_row"] = std::to_string(psf.center_row);
  m["center_col"] = std::to_string(psf.center_col);
  const std::string path = out_path(cfg, "psf.csas");
  write_tensor(path, to_tensor(psf.image.data, std::move(m)));
  emit(log, path);
  const std::string png = out_path(cfg, "psf.png");
  export_png(psf.image, s.floor_db, png);
  emit(log, png);

  const double ratio = imag_to_real_ratio(psf.image.data);
  const double width = mainlobe_width(psf);
  const std::string csv = out_path(cfg, "psf.csv");
  write_text(csv, "imag_to_real_ratio,mainlobe_width_m,bandwidth_hz\n" + format_double(ratio) + "," +
                      format_double(width) + "," + format_double(s.waveform.bandwidth()) + "\n");
  emit(log, csv);
  log << "max|Im|/max|Re| = " << ratio << ", -6 dB main lobe = " << width << " m\n";
}

void cmd_beamform(const RunConfig& cfg, std::ostream& log) {
  const Setup s = make_setup(cfg);
  const Acquisition a = acquire(cfg, s, "");
  const std::string path = out_path(cfg, "das.csas");
  write_tensor(path, to_tensor(a.image.data, grid_metadata(s, a.image.grid)));
  emit(log, path);
  const std::string png = out_path(cfg, "das.png");
  export_png(a.image, s.floor_db, png);
  emit(log, png);
}

void cmd_deconvolve(const RunConfig& cfg, std::ostream& log) {
  const Setup s = make_setup(cfg);
  const std::string method = cfg.str("deconv.method");
  check_method(method);
  const Acquisition a = acquire(cfg, s, "deconv.image");
  const Psf psf = make_psf(cfg, s, a.image.grid);

  MlpParams<float> net;
  const DeconvResult r = run_method(method, cfg, a.image, psf, method == "sinr" ? &net : nullptr);

  Metadata m = grid_metadata(s, a.image.grid);
  m["method"] = method;
  m["iterations_run"] = std::to_string(r.iterations_run);
  m["best_iteration"] = std::to_string(r.best_iteration);
  if (!r.loss_trace.empty()) m["final_loss"] = format_double(r.loss_trace.back());
  const std::string path = out_path(cfg, method + ".csas");
  write_tensor(path, to_tensor(r.field.data, std::move(m)));
  emit(log, path);
  const std::string png = out_path(cfg, method + ".png");
  export_png(ComplexImage{r.field.data, r.field.grid}, s.floor_db, png);
  emit(log, png);
  const std::string loss = out_path(cfg, method + "_loss.csv");
  write_text(loss, loss_csv(r.loss_trace));
  emit(log, loss);
  if (method == "sinr") {
    const SinrConfig sc = sinr_config(cfg);
    const std::string ckpt = out_path(cfg, "sinr_checkpoint.csas");
    save_checkpoint(ckpt, net, make_fourier_encoding(sc.features, sc.kappa, sc.seed), sc);
    emit(log, ckpt);
  }

  if (a.truth) {
    const double radius = mask_radius(s, a.image.grid.n);
    const std::string scene = scene_name(cfg, s);
    const MetricReport das = evaluate(a.image.data, a.truth->sigma, radius, scene, "das", s.noise_db);
    const MetricReport est = evaluate(r.field.data, a.truth->sigma, radius, scene, method, s.noise_db);
    const std::string csv = out_path(cfg, method + "_metrics.csv");
    write_text(csv, csv_header() + "\n" + csv_row(das) + "\n" + csv_row(est) + "\n");
    emit(log, csv);
    log << "das psnr " << das.psnr_db << " dB ssim " << das.ssim << "; " << method << " psnr " << est.psnr_db
        << " dB ssim " << est.ssim << "\n";
  }
}

void cmd_eval(const RunConfig& cfg, std::ostream& log) {
  const Setup s = make_setup(cfg);
  ScatterScene truth;
  if (!cfg.str("eval.truth").empty()) {
    truth = scene_from_tensor(read_tensor(cfg.str("eval.truth")));
  } else {
    truth = make_truth(cfg, s);
  }
  CImage field;
  std::string label = "das";
  if (!cfg.str("eval.field").empty()) {
    const Tensor t = read_tensor(cfg.str("eval.field"));
    field = to_cimage(t);
    const auto it = t.metadata.find("method");
    label = it != t.metadata.end() ? it->second : fs::path(cfg.str("eval.field")).stem().string();
  } else {
    field = beamform(s, simulate_pings(s, truth), truth.grid).data;
  }
  if (field.rows() != truth.grid.n || field.cols() != truth.grid.n)
    throw InvalidArgument("eval: field and truth sizes differ");
  const std::string scene = cfg.str("eval.truth").empty() ? scene_name(cfg, s)
                                                          : fs::path(cfg.str("eval.truth")).stem().string();
  const MetricReport r = evaluate(field, truth.sigma, mask_radius(s, truth.grid.n), scene, label, s.noise_db);
  const std::string csv = out_path(cfg, "eval.csv");
  write_text(csv, csv_header() + "\n" + csv_row(r) + "\n");
  emit(log, csv);
  log << csv_row(r) << "\n";
}

void cmd_quadrant_demo(const RunConfig& cfg, std::ostream& log) {
  const Setup s = make_setup(cfg);
  const Acquisition a = acquire(cfg, s, "deconv.image");
  const Psf psf = make_psf(cfg, s, a.image.grid);
  const QuadrantReport rep = quadrant_experiment(a.image, psf, gd_config(cfg));

  const auto png = [&](const std::string& name, const CImage& img) {
    const std::string p = out_path(cfg, name);
    export_png(ComplexImage{img, a.image.grid}, s.floor_db, p);
    emit(log, p);
  };
  png("quadrant_das.png", a.image.data);
  png("quadrant_complex.png", rep.complex_run.field.data);
  png("quadrant_real.png", rep.real_run.field.data);
  for (const auto& [name, run] : {std::pair{"complex", &rep.complex_run}, std::pair{"real", &rep.real_run}}) {
    Metadata m = grid_metadata(s, a.image.grid);
    m["method"] = std::string("gd-") + name;
    const std::string p = out_path(cfg, std::string("quadrant_") + name + ".csas");
    write_tensor(p, to_tensor(run->field.data, std::move(m)));
    emit(log, p);
  }

  static const char* names[4] = {"top-left", "top-right", "bottom-left", "bottom-right"};
  std::string csv = "quadrant,initial,complex,real,complex_fraction,real_fraction\n";
  for (int q = 0; q < 4; ++q) {
    csv += std::string(names[q]) + "," + format_double(rep.zero[q]) + "," + format_double(rep.complex[q]) + "," +
           format_double(rep.real[q]) + "," + format_double(rep.complex_fraction(q)) + "," +
           format_double(rep.real_fraction(q)) + "\n";
  }
  double zero_total = 0.0;
  for (double z : rep.zero) zero_total += z;
  csv += "total," + format_double(zero_total) + "," + format_double(rep.complex_total) + "," +
         format_double(rep.real_total) + "," + format_double(rep.complex_total / zero_total) + "," +
         format_double(rep.real_total / zero_total) + "\n";
  const std::string path = out_path(cfg, "quadrant_residuals.csv");
  write_text(path, csv);
  emit(log, path);
  log << "complex/real residual ratio = " << rep.ratio() << "\n";
}

namespace {

struct SweepCell {
  std::size_t noise_index = 0;
  double noise_db = 0.0;
  std::string method;
  std::optional<double> kappa;
  std::optional<double> learning_rate;

  std::string label() const {
    std::string l = method;
    if (kappa) l += ":kappa=" + format_double(*kappa);
    if (learning_rate) l += ":lr=" + format_double(*learning_rate);
    return l;
  }
  std::string file_stem() const { return sanitize("noise=" + format_double(noise_db) + "_" + label()); }
};

std::vector<SweepCell> sweep_cells(const RunConfig& cfg, std::size_t& variants_per_noise) {
  const std::vector<double> noise = cfg.num_list("sweep.noise_db");
  const std::vector<std::string> methods = cfg.list("sweep.methods");
  if (noise.empty()) throw ConfigError("'sweep.noise_db' must list at least one noise level");
  if (methods.empty()) throw ConfigError("'sweep.methods' must list at least one method");
  for (const auto& m : methods)
    if (m != "das") check_method(m);
  std::vector<std::optional<double>> kappas, rates;
  for (double k : cfg.num_list("sweep.kappas")) kappas.emplace_back(k);
  for (double r : cfg.num_list("sweep.learning_rates")) rates.emplace_back(r);
  if (kappas.empty()) kappas.emplace_back();
  if (rates.empty()) rates.emplace_back();

  std::vector<SweepCell> cells;
  for (std::size_t i = 0; i < noise.size(); ++i) {
    for (const auto& m : methods) {
      if (m != "sinr") {
        cells.push_back({i, noise[i], m, {}, {}});
        continue;
      }
      for (const auto& k : kappas)
        for (const auto& r : rates) cells.push_back({i, noise[i], m, k, r});
    }
  }
  variants_per_noise = cells.size() / noise.size();
  return cells;
}

}  // namespace

void cmd_sweep(const RunConfig& cfg, std::ostream& log) {
  const Setup s = make_setup(cfg);
  std::size_t per_row = 0;
  const std::vector<SweepCell> cells = sweep_cells(cfg, per_row);
  const ScatterScene truth = make_truth(cfg, s);
  const std::string scene = scene_name(cfg, s);
  const double radius = mask_radius(s, truth.grid.n);

  // A cell is finished once its row file exists; the row is written last.
  const auto row_path = [&](const SweepCell& c) { return out_path(cfg, "sweep/" + c.file_stem() + ".csv"); };
  const auto field_path = [&](const SweepCell& c) { return out_path(cfg, "sweep/" + c.file_stem() + ".csas"); };
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (!fs::exists(row_path(cells[i]))) pending.push_back(i);

  if (!pending.empty()) {
    const Psf psf = make_psf(cfg, s, truth.grid);
    std::map<std::size_t, double> levels;
    for (std::size_t i : pending) levels[cells[i].noise_index] = cells[i].noise_db;
    std::vector<std::pair<std::size_t, double>> level_list(levels.begin(), levels.end());
    std::vector<ComplexImage> images(level_list.size());
    // Every noise level reuses noise.seed, so the levels differ only in scale.
    parallel_for(level_list.size(), [&](std::size_t i) {
      images[i] = beamform(s, simulate_pings(s, truth, level_list[i].second), truth.grid);
    });
    std::map<std::size_t, const ComplexImage*> image_of;
    for (std::size_t i = 0; i < level_list.size(); ++i) image_of[level_list[i].first] = &images[i];

    parallel_for(pending.size(), [&](std::size_t p) {
      const SweepCell& c = cells[pending[p]];
      const ComplexImage& image = *image_of.at(c.noise_index);
      RunConfig cell_cfg = cfg;
      if (c.kappa) cell_cfg.set("sinr.kappa", format_double(*c.kappa));
      if (c.learning_rate) cell_cfg.set("sinr.learning_rate", format_double(*c.learning_rate));
      CImage field = image.data;
      std::vector<double> trace;
      if (c.method != "das") {
        DeconvResult r = run_method(c.method, cell_cfg, image, psf);
        field = std::move(r.field.data);
        trace = std::move(r.loss_trace);
      }
      Metadata m = grid_metadata(s, truth.grid);
      m["method"] = c.label();
      m["noise_psnr_db"] = format_double(c.noise_db);
      write_tensor(field_path(c), to_tensor(field, std::move(m)));
      const MetricReport rep = evaluate(field, truth.sigma, radius, scene, c.label(), c.noise_db);
      write_text(row_path(c), csv_row(rep) + "\n");
    });
  }

  std::string csv = csv_header() + "\n";
  const int n = truth.grid.n;
  constexpr int gap = 2;
  const std::size_t rows = cells.size() / per_row;
  const int width = static_cast<int>(per_row) * (n + gap) - gap;
  const int height = static_cast<int>(rows) * (n + gap) - gap;
  std::vector<std::uint8_t> grid(static_cast<std::size_t>(width) * height, 0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    csv += read_text(row_path(cells[i]));
    const RealImage db = log_magnitude(to_cimage(read_tensor(field_path(cells[i]))), s.floor_db);
    const int r0 = static_cast<int>(i / per_row) * (n + gap);
    const int c0 = static_cast<int>(i % per_row) * (n + gap);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        grid[static_cast<std::size_t>(r0 + r) * width + c0 + c] = db_to_gray(db(r, c), s.floor_db);
  }
  const std::string path = out_path(cfg, "sweep.csv");
  write_text(path, csv);
  emit(log, path);
  const std::string png = out_path(cfg, "sweep.png");
  write_png_gray(png, grid, width, height);
  emit(log, png);
  log << "sweep: " << cells.size() << " cells, " << pending.size() << " computed, " << cells.size() - pending.size()
      << " resumed\n";
}

const std::vector<CommandInfo>& commands() {
  static const std::vector<CommandInfo> list = {
      {"simulate", "synthesize raw pings for the configured scene", &cmd_simulate},
      {"psf", "simulate the centred point spread function", &cmd_psf},
      {"beamform", "delay-and-sum image from simulated or stored pings", &cmd_beamform},
      {"deconvolve", "deconvolve the DAS image with deconv.method", &cmd_deconvolve},
      {"eval", "PSNR/SSIM of a field against the ground truth", &cmd_eval},
      {"quadrant-demo", "complex vs real-constrained deconvolution residuals", &cmd_quadrant_demo},
      {"sweep", "noise / method / kappa / learning-rate grid", &cmd_sweep},
      {"scene-gen", "write a procedural ground-truth scene", &cmd_scene_gen},
  };
  return list;
}

}  // namespace csas::app
