#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "csas/beamformer.hpp"
#include "csas/core.hpp"

namespace csas {

/// On-disk element type. Values are held as double in memory and stored as
/// little-endian f32.
enum class DType : std::uint16_t { F32Real = 0, F32Complex = 1 };

/// Key=value metadata, kept sorted so files are byte-reproducible.
using Metadata = std::map<std::string, std::string>;

/// Row-major n-d array. For F32Real the imaginary parts are ignored.
struct Tensor {
  DType dtype = DType::F32Complex;
  std::vector<std::uint32_t> dims;
  std::vector<cdouble> values;
  Metadata metadata;

  std::size_t element_count() const;
};

inline constexpr std::uint16_t kTensorVersion = 1;

/// Layout: "CSAS", u16 version, u16 dtype, u32 rank, u32 dims[rank],
/// u32 metadata bytes, "key=value\n" lines, payload.
std::string serialize_tensor(const Tensor& t);
/// Throws FormatError on bad magic, unknown version or dtype, truncation or
/// trailing bytes.
Tensor parse_tensor(const std::string& bytes);

void write_tensor(const std::string& path, const Tensor& t);
Tensor read_tensor(const std::string& path);

Tensor to_tensor(const CImage& img, Metadata metadata = {});
Tensor to_tensor(const RealImage& img, Metadata metadata = {});
CImage to_cimage(const Tensor& t);
/// Throws FormatError for complex tensors.
RealImage to_real_image(const Tensor& t);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// 8-bit grayscale PNG of log_magnitude(img, floor_db) with [floor_db, 0]
/// mapped linearly to [0, 255].
void export_png(const ComplexImage& img, double floor_db, const std::string& path);
/// Writes an 8-bit grayscale image (row-major bytes, width x height).
void write_png_gray(const std::string& path, const std::vector<std::uint8_t>& pixels, int width, int height);
/// Maps log-magnitude values in [floor_db, 0] to 0..255.
std::uint8_t db_to_gray(double db, double floor_db);

}  // namespace csas
