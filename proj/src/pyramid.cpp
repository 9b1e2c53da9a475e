#include "mss/pyramid.hpp"

#include <algorithm>
#include <array>

#include "mss/binary_io.hpp"
#include "mss/error.hpp"
#include "mss/parallel.hpp"

namespace mss {

std::string to_string(Padding p) { return p == Padding::Zero ? "zero" : "replicate"; }

Padding parse_padding(const std::string& s) {
  if (s == "zero") return Padding::Zero;
  if (s == "replicate") return Padding::Replicate;
  throw Error("unknown padding mode '" + s + "'");
}

FeaturePyramid build_pyramid(const Image& img, int levels, int cell_size, Padding padding,
                             std::optional<TemplateDims> min_template) {
  if (levels < 1) throw Error("pyramid needs at least one level");
  if (cell_size <= 0) throw Error("cell size must be positive");

  // Level dims are known up front, so truncation is decided before any work.
  int usable = 0;
  for (int s = 0; s < levels; ++s) {
    const double f = level_scale(s);
    const long w = std::max(1L, std::lround(img.width * f)) / cell_size;
    const long h = std::max(1L, std::lround(img.height * f)) / cell_size;
    if (w < 1 || h < 1) break;
    if (min_template && (w < min_template->width || h < min_template->height)) break;
    ++usable;
  }
  if (usable == 0) throw Error("image too small for a single pyramid level");

  FeaturePyramid pyr;
  pyr.cell_x = pyr.cell_y = cell_size;
  pyr.padding = padding;
  pyr.kind = FeatureKind::Hog;
  pyr.truncated = usable < levels;
  pyr.levels.resize(static_cast<std::size_t>(usable));
  for (int s = 0; s < usable; ++s) pyr.scales.push_back(level_scale(s));
  parallel_for(usable, [&](int s) {
    pyr.levels[static_cast<std::size_t>(s)] =
        s == 0 ? extract_hog(img, cell_size) : extract_hog(resize(img, level_scale(s)), cell_size);
  });
  return pyr;
}

void read_window(const FeaturePyramid& pyr, PyramidLocation loc, TemplateDims dims,
                 std::span<float> out, Padding padding) {
  const FeatureMap& m = pyr.levels.at(static_cast<std::size_t>(loc.s));
  const int d = m.channels;
  float* dst = out.data();
  const bool inside = loc.x >= 0 && loc.y >= 0 && loc.x + dims.width <= m.width &&
                      loc.y + dims.height <= m.height;
  for (int j = 0; j < dims.height; ++j) {
    const int y = loc.y + j;
    if (inside) {
      const float* row = m.values.data() + (static_cast<std::size_t>(y) * m.width + loc.x) * d;
      std::copy(row, row + static_cast<std::size_t>(dims.width) * d, dst);
      dst += static_cast<std::size_t>(dims.width) * d;
      continue;
    }
    for (int i = 0; i < dims.width; ++i, dst += d) {
      int x = loc.x + i;
      int yy = y;
      const bool in = x >= 0 && yy >= 0 && x < m.width && yy < m.height;
      if (!in) {
        if (padding == Padding::Zero || m.width == 0 || m.height == 0) {
          std::fill(dst, dst + d, 0.0f);
          continue;
        }
        x = std::clamp(x, 0, m.width - 1);
        yy = std::clamp(yy, 0, m.height - 1);
      }
      const auto c = m.cell(x, yy);
      std::copy(c.begin(), c.end(), dst);
    }
  }
}

std::vector<float> read_window(const FeaturePyramid& pyr, PyramidLocation loc, TemplateDims dims) {
  std::vector<float> out(static_cast<std::size_t>(dims.cells()) * pyr.channels());
  read_window(pyr, loc, dims, out);
  return out;
}

void read_multiscale(const FeaturePyramid& pyr, double cx, double cy, TemplateDims dims,
                     std::span<float> out) {
  const auto geom = pyr.geometry();
  const std::size_t block = static_cast<std::size_t>(dims.cells()) * pyr.channels();
  for (int s = 0; s < pyr.level_count(); ++s)
    read_window(pyr, map_location(geom, cx, cy, s, dims), dims, out.subspan(s * block, block));
}

std::vector<float> read_multiscale(const FeaturePyramid& pyr, double cx, double cy, TemplateDims dims) {
  std::vector<float> out(static_cast<std::size_t>(dims.cells()) * pyr.channels() * pyr.level_count());
  read_multiscale(pyr, cx, cy, dims, out);
  return out;
}

namespace {

constexpr std::array<std::uint8_t, 7> kPyramidMagic{'M', 'S', 'S', 'F', 'P', '1', '\0'};
constexpr std::uint64_t kMaxValues = 1ull << 31;

}  // namespace

std::vector<std::uint8_t> encode_pyramid(const FeaturePyramid& pyr) {
  detail::ByteWriter w;
  w.raw(kPyramidMagic.data(), kPyramidMagic.size());
  w.u32(static_cast<std::uint32_t>(pyr.level_count()));
  w.u32(static_cast<std::uint32_t>(pyr.channels()));
  w.u32(static_cast<std::uint32_t>(pyr.cell_x));
  w.u32(static_cast<std::uint32_t>(pyr.cell_y));
  w.u32(static_cast<std::uint32_t>(pyr.padding));
  for (int s = 0; s < pyr.level_count(); ++s) {
    const FeatureMap& m = pyr.levels[static_cast<std::size_t>(s)];
    w.u32(static_cast<std::uint32_t>(m.width));
    w.u32(static_cast<std::uint32_t>(m.height));
    w.f64(pyr.scales[static_cast<std::size_t>(s)]);
    w.raw(m.values.data(), m.values.size() * sizeof(float));
  }
  return w.take();
}

FeaturePyramid decode_pyramid(std::span<const std::uint8_t> bytes) {
  using Kind = ParseError::Kind;
  detail::ByteReader r(bytes);
  r.expect_magic(kPyramidMagic);
  const std::uint32_t levels = r.u32();
  const std::uint32_t d = r.u32();
  const std::uint32_t cx = r.u32();
  const std::uint32_t cy = r.u32();
  const std::size_t padding_at = r.pos();
  const std::uint32_t padding = r.u32();
  if (levels == 0) throw ParseError(Kind::MalformedHeader, 7, "pyramid has zero levels");
  if (d == 0) throw ParseError(Kind::MalformedHeader, 11, "pyramid has zero channels");
  if (cx == 0 || cy == 0) throw ParseError(Kind::MalformedHeader, 15, "zero cell stride");
  if (padding > 1) throw ParseError(Kind::BadValue, padding_at, "unknown padding code");

  FeaturePyramid pyr;
  pyr.cell_x = static_cast<int>(cx);
  pyr.cell_y = static_cast<int>(cy);
  pyr.padding = static_cast<Padding>(padding);
  pyr.kind = FeatureKind::External;
  for (std::uint32_t s = 0; s < levels; ++s) {
    const std::size_t at = r.pos();
    const std::uint32_t w = r.u32();
    const std::uint32_t h = r.u32();
    const double scale = r.f64();
    const std::uint64_t n = std::uint64_t(w) * h * d;
    if (w == 0 || h == 0 || n > kMaxValues)
      throw ParseError(Kind::MalformedHeader, at, "level dimensions out of range");
    if (!(scale > 0)) throw ParseError(Kind::BadValue, at + 8, "level scale must be positive");
    if (r.remaining() < n * 4)
      throw ParseError(Kind::TruncatedPayload, bytes.size(),
                       "level " + std::to_string(s) + " declares more values than the file holds");
    FeatureMap m(static_cast<int>(w), static_cast<int>(h), static_cast<int>(d));
    r.f32_block(m.values);
    pyr.levels.push_back(std::move(m));
    pyr.scales.push_back(scale);
  }
  if (r.remaining() != 0)
    throw ParseError(Kind::MalformedHeader, r.pos(), "trailing bytes after the declared levels");
  return pyr;
}

void export_pyramid(const FeaturePyramid& pyr, const std::filesystem::path& path) {
  detail::write_file(path, encode_pyramid(pyr));
}

FeaturePyramid import_pyramid(const std::filesystem::path& path) {
  return decode_pyramid(detail::read_file(path));
}

}  // namespace mss
