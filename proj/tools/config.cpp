#include "config.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace csas::app {

namespace {

// Every recognised key and its default. Defaults give the full 400x400,
// 0.8 m setup; the configs/ directory holds the smaller experiments.
const std::map<std::string, std::string>& schema() {
  static const std::map<std::string, std::string> s = {
      {"scene.kind", "sparse"},
      {"scene.n", "400"},
      {"scene.extent", "0.8"},
      {"scene.z0", "0"},
      {"scene.seed", "0"},
      {"scene.count", "0"},
      {"scene.cells", "4"},
      {"scene.base", "ripples"},
      {"scene.spacing", "3"},
      {"scene.support", "0.35"},
      {"scene.file", ""},
      {"ring.radius", "1"},
      {"ring.height", "1"},
      {"ring.angles", "180"},
      {"waveform.f_start", "30000"},
      {"waveform.f_stop", "10000"},
      {"waveform.duration", "0.001"},
      {"waveform.fs", "100000"},
      {"medium.c", "343"},
      {"noise.psnr_db", "inf"},
      {"noise.seed", "0"},
      {"beamform.upsample", "8"},
      {"beamform.pings", ""},
      {"psf.file", ""},
      {"deconv.method", "wiener"},
      {"deconv.image", ""},
      {"inverse.eps", "1e-8"},
      {"wiener.alpha", "1e-4"},
      {"gd.learning_rate", "1"},
      {"gd.momentum", "0.9"},
      {"gd.iterations", "2000"},
      {"gd.init_scale", "0.1"},
      {"gd.patience", "50"},
      {"gd.eps_tv", "1e-6"},
      {"gd.tv_weight", "3e-4"},
      {"gd.grad_weight", "1e-4"},
      {"gd.real_only", "false"},
      {"bremen.relaxation", "0.5"},
      {"bremen.iterations", "500"},
      {"sinr.kappa", "30"},
      {"sinr.features", "256"},
      {"sinr.hidden_width", "128"},
      {"sinr.learning_rate", "0.001"},
      {"sinr.iterations", "2000"},
      {"sinr.seed", "0"},
      {"sinr.precision", "float"},
      {"eval.mask_radius", "0.4"},
      {"eval.field", ""},
      {"eval.truth", ""},
      {"output.dir", "out"},
      {"output.floor_db", "-40"},
      {"sweep.noise_db", "inf"},
      {"sweep.methods", "wiener"},
      {"sweep.kappas", ""},
      {"sweep.learning_rates", ""},
  };
  return s;
}

const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> a = {
      {"scene", "scene.kind"}, {"kind", "scene.kind"}, {"n", "scene.n"},      {"seed", "scene.seed"},
      {"method", "deconv.method"}, {"out", "output.dir"}, {"noise", "noise.psnr_db"},
  };
  return a;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

double parse_number(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError("'" + key + "': expected a number, got '" + text + "'");
  return v;
}

RunConfig::RunConfig() : values_(schema()) {}

std::string RunConfig::resolve_alias(const std::string& key) {
  const auto it = aliases().find(key);
  return it == aliases().end() ? key : it->second;
}

void RunConfig::load_file(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("cannot read config '" + path + "': " + e.message() +
                      (e.line() ? " (line " + std::to_string(e.line()) + ")" : ""));
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config '" + path + "': key '" + section + "' outside a [section]");
    for (const auto& [key, value] : body) set(section + "." + key, value.get_value<std::string>());
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const std::string k = resolve_alias(key);
  const auto it = values_.find(k);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second = trim(value);
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& RunConfig::str(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw std::logic_error("config key missing from schema: " + key);
  return it->second;
}

double RunConfig::num(const std::string& key) const { return parse_number(str(key), key); }

int RunConfig::integer(const std::string& key) const {
  const double v = num(key);
  if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > std::numeric_limits<int>::max())
    throw ConfigError("'" + key + "': expected an integer, got '" + str(key) + "'");
  return static_cast<int>(v);
}

std::uint64_t RunConfig::seed(const std::string& key) const {
  const std::string& t = str(key);
  std::uint64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError("'" + key + "': expected a non-negative integer seed, got '" + t + "'");
  return v;
}

bool RunConfig::flag(const std::string& key) const {
  const std::string& t = str(key);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("'" + key + "': expected true or false, got '" + t + "'");
}

std::vector<std::string> RunConfig::list(const std::string& key) const {
  std::vector<std::string> out;
  std::istringstream in(str(key));
  for (std::string item; std::getline(in, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> RunConfig::num_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : list(key)) out.push_back(parse_number(item, key));
  return out;
}

}  // namespace csas::app
