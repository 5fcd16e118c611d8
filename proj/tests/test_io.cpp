#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <png.h>

#include "csas/io.hpp"
#include "helpers.hpp"

using namespace csas;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("csas_io_" + name)).string();
}

// Decodes an 8-bit grayscale PNG with libpng.
std::vector<std::uint8_t> read_gray(const std::string& path, int& width, int& height) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  REQUIRE(png_image_begin_read_from_file(&img, path.c_str()));
  img.format = PNG_FORMAT_GRAY;
  width = static_cast<int>(img.width);
  height = static_cast<int>(img.height);
  std::vector<std::uint8_t> px(PNG_IMAGE_SIZE(img));
  REQUIRE(png_image_finish_read(&img, nullptr, px.data(), 0, nullptr));
  return px;
}

}  // namespace

TEST_CASE("tensor layout of a 2x2 zero image") {
  const std::string bytes = serialize_tensor(to_tensor(CImage(CImage::Zero(2, 2))));
  // magic 4 + version 2 + dtype 2 + rank 4 + dims 8 + metadata length 4 + payload 32
  REQUIRE(bytes.size() == 56);
  CHECK(bytes.substr(0, 4) == "CSAS");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[6] == 1);  // complex
  CHECK(bytes[8] == 2);  // rank
  CHECK(bytes[12] == 2);
  CHECK(bytes[16] == 2);
  CHECK(bytes.substr(20, 4) == std::string(4, '\0'));
  CHECK(bytes.substr(24) == std::string(32, '\0'));
}

TEST_CASE("tensor round trip is exact for f32 values") {
  std::mt19937_64 rng(1);
  CImage img = test::random_cimage(64, 64, rng);
  img = img.unaryExpr([](cdouble v) { return cdouble(float(v.real()), float(v.imag())); });
  Metadata meta{{"fs", "100000"}, {"kind", "sparse"}};
  const std::string path = temp_path("rt.csas");
  write_tensor(path, to_tensor(img, meta));
  const Tensor t = read_tensor(path);
  std::filesystem::remove(path);
  CHECK(to_cimage(t) == img);
  CHECK(t.metadata == meta);
  CHECK(serialize_tensor(t) == serialize_tensor(to_tensor(img, meta)));

  // Row-major payload: element (0, 1) follows (0, 0).
  CImage small(2, 3);
  small << 1, 2, 3, 4, 5, 6;
  const Tensor st = to_tensor(small);
  CHECK(st.dims == std::vector<std::uint32_t>{2, 3});
  CHECK(st.values[1] == cdouble(2.0));
  CHECK(st.values[3] == cdouble(4.0));

  const RealImage real = small.real();
  const Tensor rt = parse_tensor(serialize_tensor(to_tensor(real)));
  CHECK(rt.dtype == DType::F32Real);
  CHECK(to_real_image(rt) == real);
  CHECK_THROWS_AS(to_real_image(to_tensor(small)), FormatError);
}

TEST_CASE("malformed tensors are rejected") {
  const std::string good = serialize_tensor(to_tensor(CImage(CImage::Ones(3, 3)), {{"a", "b"}}));
  CHECK_NOTHROW(parse_tensor(good));
  std::string bad = good;
  bad[0] = 'X';
  CHECK_THROWS_AS(parse_tensor(bad), FormatError);
  bad = good;
  bad[4] = 2;
  CHECK_THROWS_AS(parse_tensor(bad), FormatError);
  bad = good;
  bad[6] = 7;
  CHECK_THROWS_AS(parse_tensor(bad), FormatError);
  for (std::size_t cut : {std::size_t(0), std::size_t(3), std::size_t(10), good.size() - 1})
    CHECK_THROWS_AS(parse_tensor(good.substr(0, cut)), FormatError);
  CHECK_THROWS_AS(parse_tensor(good + "x"), FormatError);
  CHECK_THROWS_AS(read_tensor(temp_path("does_not_exist.csas")), std::exception);
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int i = 0; i < 1000; ++i) {
    const double v = g(rng) * std::pow(10.0, i % 40 - 20);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("PNG export maps dB linearly to gray levels") {
  CHECK(db_to_gray(0.0, -40.0) == 255);
  CHECK(db_to_gray(-40.0, -40.0) == 0);
  CHECK(db_to_gray(-80.0, -40.0) == 0);
  CHECK(std::abs(int(db_to_gray(-20.0, -40.0)) - 128) <= 1);

  ComplexImage img;
  img.grid = build_grid(4, 0.006, 0.0);
  img.data = CImage::Zero(4, 4);
  img.data(0, 0) = {0.0, 2.0};   // peak
  img.data(1, 2) = 0.2;          // -20 dB
  img.data(3, 3) = 2e-3;         // -60 dB, below the floor
  const std::string path = temp_path("img.png");
  export_png(img, -40.0, path);
  int w = 0, h = 0;
  const auto px = read_gray(path, w, h);
  std::filesystem::remove(path);
  CHECK(w == 4);
  CHECK(h == 4);
  CHECK(px[0] == 255);
  CHECK(std::abs(int(px[1 * 4 + 2]) - 128) <= 1);
  CHECK(px[3 * 4 + 3] == 0);
  CHECK(px[2 * 4 + 1] == 0);

  const std::string bad = temp_path("gray.png");
  CHECK_THROWS(write_png_gray(bad, {1, 2, 3}, 2, 2));
}
