#include "csas/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <png.h>

namespace csas {

namespace {

static_assert(std::endian::native == std::endian::little, "TensorFile I/O assumes a little-endian host");

constexpr char kMagic[4] = {'C', 'S', 'A', 'S'};

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <class T>
  T get(const char* what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string take(std::size_t n, const char* what) {
    need(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) const {
    if (remaining() < n) throw FormatError(std::string("tensor file truncated while reading ") + what);
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

std::size_t dtype_components(DType d) { return d == DType::F32Complex ? 2 : 1; }

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

std::size_t Tensor::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::string serialize_tensor(const Tensor& t) {
  if (t.dtype != DType::F32Real && t.dtype != DType::F32Complex)
    throw InvalidArgument("write_tensor: unsupported dtype");
  require(t.values.size() == t.element_count(), "write_tensor: value count does not match dims");
  std::string meta;
  for (const auto& [k, v] : t.metadata) {
    require(k.find('=') == std::string::npos && k.find('\n') == std::string::npos && v.find('\n') == std::string::npos,
            "write_tensor: metadata keys may not contain '=' or newlines");
    meta += k + "=" + v + "\n";
  }
  std::string out(kMagic, 4);
  put<std::uint16_t>(out, kTensorVersion);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(t.dtype));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) put<std::uint32_t>(out, d);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(meta.size()));
  out += meta;
  out.reserve(out.size() + t.values.size() * 4 * dtype_components(t.dtype));
  for (const cdouble& v : t.values) {
    put<float>(out, static_cast<float>(v.real()));
    if (t.dtype == DType::F32Complex) put<float>(out, static_cast<float>(v.imag()));
  }
  return out;
}

Tensor parse_tensor(const std::string& bytes) {
  Reader in(bytes);
  if (in.take(4, "magic") != std::string(kMagic, 4)) throw FormatError("not a tensor file (bad magic)");
  const auto version = in.get<std::uint16_t>("version");
  if (version != kTensorVersion) throw FormatError("unsupported tensor file version " + std::to_string(version));
  const auto dtype = in.get<std::uint16_t>("dtype");
  if (dtype > 1) throw FormatError("unknown tensor dtype " + std::to_string(dtype));
  Tensor t;
  t.dtype = static_cast<DType>(dtype);
  const auto rank = in.get<std::uint32_t>("rank");
  if (rank > 16) throw FormatError("implausible tensor rank " + std::to_string(rank));
  for (std::uint32_t i = 0; i < rank; ++i) t.dims.push_back(in.get<std::uint32_t>("dims"));
  const auto meta_len = in.get<std::uint32_t>("metadata length");
  std::istringstream meta(in.take(meta_len, "metadata"));
  for (std::string line; std::getline(meta, line);) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("malformed metadata line '" + line + "'");
    t.metadata[line.substr(0, eq)] = line.substr(eq + 1);
  }
  const std::size_t count = t.element_count();
  const std::size_t comps = dtype_components(t.dtype);
  if (in.remaining() != count * comps * sizeof(float)) {
    throw FormatError(in.remaining() < count * comps * sizeof(float) ? "tensor file truncated in payload"
                                                                      : "tensor file has trailing bytes");
  }
  t.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const float re = in.get<float>("payload");
    const float im = comps == 2 ? in.get<float>("payload") : 0.0f;
    t.values[i] = cdouble(re, im);
  }
  return t;
}

void write_tensor(const std::string& path, const Tensor& t) { write_file(path, serialize_tensor(t)); }

Tensor read_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return parse_tensor(buf.str());
}

Tensor to_tensor(const CImage& img, Metadata metadata) {
  Tensor t;
  t.dtype = DType::F32Complex;
  t.dims = {static_cast<std::uint32_t>(img.rows()), static_cast<std::uint32_t>(img.cols())};
  t.values.reserve(img.size());
  for (Eigen::Index r = 0; r < img.rows(); ++r)
    for (Eigen::Index c = 0; c < img.cols(); ++c) t.values.push_back(img(r, c));
  t.metadata = std::move(metadata);
  return t;
}

Tensor to_tensor(const RealImage& img, Metadata metadata) {
  Tensor t = to_tensor(CImage(img.cast<cdouble>()), std::move(metadata));
  t.dtype = DType::F32Real;
  return t;
}

CImage to_cimage(const Tensor& t) {
  if (t.dims.size() != 2) throw FormatError("expected a rank-2 tensor, got rank " + std::to_string(t.dims.size()));
  CImage img(t.dims[0], t.dims[1]);
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < img.rows(); ++r)
    for (Eigen::Index c = 0; c < img.cols(); ++c) img(r, c) = t.values[i++];
  return img;
}

RealImage to_real_image(const Tensor& t) {
  if (t.dtype != DType::F32Real) throw FormatError("expected a real-valued tensor");
  return to_cimage(t).real();
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::uint8_t db_to_gray(double db, double floor_db) {
  require(floor_db < 0.0, "db_to_gray: floor must be negative");
  const double t = std::clamp((db - floor_db) / -floor_db, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(255.0 * t));
}

void write_png_gray(const std::string& path, const std::vector<std::uint8_t>& pixels, int width, int height) {
  require(width > 0 && height > 0, "write_png: empty image");
  require(pixels.size() == static_cast<std::size_t>(width) * height, "write_png: pixel count mismatch");
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(width);
  img.height = static_cast<png_uint_32>(height);
  img.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&img, path.c_str(), 0, pixels.data(), width, nullptr))
    throw IoError("cannot write PNG '" + path + "': " + img.message);
}

void export_png(const ComplexImage& img, double floor_db, const std::string& path) {
  const RealImage db = log_magnitude(img.data, floor_db);
  std::vector<std::uint8_t> px;
  px.reserve(db.size());
  for (Eigen::Index r = 0; r < db.rows(); ++r)
    for (Eigen::Index c = 0; c < db.cols(); ++c) px.push_back(db_to_gray(db(r, c), floor_db));
  write_png_gray(path, px, static_cast<int>(db.cols()), static_cast<int>(db.rows()));
}

}  // namespace csas
