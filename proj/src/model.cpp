#include "mss/model.hpp"

#include <cmath>
#include <cstring>

#include "mss/binary_io.hpp"
#include "mss/error.hpp"

namespace mss {

namespace {

constexpr std::uint8_t kMagic[] = {'M', 'S', 'S', 'M', '1', '\0'};

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::Mss: return "mss";
    case Family::Baseline: return "baseline";
    case Family::TemplatePyramid: return "template-pyramid";
  }
  return "unknown";
}

MssModel MssModel::zeros(Family family, int classes, int levels, int channels, TemplateDims dims,
                         double cell_stride, Padding padding, FeatureKind kind) {
  if (classes <= 0 || levels <= 0 || channels <= 0 || dims.width <= 0 || dims.height <= 0)
    throw Error("model shape must be positive");
  MssModel m;
  m.family = family;
  m.kind = kind;
  m.classes = classes;
  m.levels = levels;
  m.channels = channels;
  m.dims = dims;
  m.cell_stride = cell_stride;
  m.padding = padding;
  m.biases.assign(classes, 0.0f);
  for (int k = 0; k < classes; ++k) m.weights.emplace_back(m.block_length(k), 0.0f);
  return m;
}

TemplateDims MssModel::class_dims(int k) const {
  if (family != Family::TemplatePyramid) return dims;
  const double f = std::pow(2.0, 0.5 * k);
  return {static_cast<int>(std::lround(dims.width * f)), static_cast<int>(std::lround(dims.height * f))};
}

std::size_t MssModel::block_length(int k) const {
  const std::size_t per_level = level_block(k);
  return family == Family::Mss ? per_level * levels : per_level;
}

bool MssModel::populated(int k) const {
  if (biases[k] != 0.0f) return true;
  for (float v : weights[k])
    if (v != 0.0f) return true;
  return false;
}

int MssModel::populated_count() const {
  int n = 0;
  for (int k = 0; k < classes; ++k) n += populated(k) ? 1 : 0;
  return n;
}

std::uint64_t schedule_hash(std::span<const double> scales) {
  // FNV-1a over the level count and the scales rounded to 1e-9.
  std::uint64_t h = 1469598103934665603ull;
  const auto mix = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  mix(scales.size());
  for (double s : scales) mix(static_cast<std::uint64_t>(std::llround(s * 1e9)));
  return h;
}

std::vector<double> model_scales(const MssModel& model) {
  // Template-pyramid models only read level 0.
  const int n = model.family == Family::TemplatePyramid ? 1 : model.levels;
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = level_scale(i);
  return s;
}

void check_fingerprint(const MssModel& model, const FeaturePyramid& pyr) {
  std::vector<std::string> diff;
  const auto field = [&](const std::string& name, const std::string& want, const std::string& got) {
    if (want != got) diff.push_back(name + ": model " + want + ", pyramid " + got);
  };
  const auto stride = [](double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };
  field("cell_x", stride(model.cell_stride), std::to_string(pyr.cell_x));
  field("cell_y", stride(model.cell_stride), std::to_string(pyr.cell_y));
  field("padding", to_string(model.padding), to_string(pyr.padding));
  field("channels", std::to_string(model.channels), std::to_string(pyr.channels()));
  const auto want = model_scales(model);
  if (model.family == Family::TemplatePyramid) {
    if (pyr.level_count() < 1 || std::abs(pyr.scales[0] - 1.0) > 1e-9)
      diff.push_back("scale schedule: model needs level 0 at scale 1");
  } else {
    field("levels", std::to_string(model.levels), std::to_string(pyr.level_count()));
    if (pyr.level_count() == model.levels && schedule_hash(want) != schedule_hash(pyr.scales))
      diff.push_back("scale schedule: hash differs");
  }
  if (!diff.empty()) throw FingerprintMismatch(std::move(diff));
}

std::vector<std::uint8_t> encode_model(const MssModel& m) {
  detail::ByteWriter w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(static_cast<std::uint32_t>(m.classes));
  w.u32(static_cast<std::uint32_t>(m.levels));
  w.u32(static_cast<std::uint32_t>(m.channels));
  w.u32(static_cast<std::uint32_t>(m.dims.width));
  w.u32(static_cast<std::uint32_t>(m.dims.height));
  w.u32(static_cast<std::uint32_t>(m.kind) | (static_cast<std::uint32_t>(m.family) << 8));
  w.u32(static_cast<std::uint32_t>(m.padding));
  w.f64(m.cell_stride);
  for (int k = 0; k < m.classes; ++k) {
    w.f32(m.biases[k]);
    w.raw(m.weights[k].data(), m.weights[k].size() * sizeof(float));
  }
  return w.take();
}

MssModel decode_model(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  r.expect_magic(kMagic);
  const auto header = [&](const char* name) {
    const std::size_t at = r.pos();
    const std::uint32_t v = r.u32();
    if (v == 0 || v > (1u << 20))
      throw ParseError(ParseError::Kind::MalformedHeader, at, std::string("bad ") + name);
    return static_cast<int>(v);
  };
  const int k = header("class count");
  const int s = header("level count");
  const int d = header("channel count");
  const int tw = header("template width");
  const int th = header("template height");
  std::size_t at = r.pos();
  const std::uint32_t code = r.u32();
  const std::uint32_t kind = code & 0xff, family = (code >> 8) & 0xff;
  if (kind > 1 || family > 2 || (code >> 16) != 0)
    throw ParseError(ParseError::Kind::BadValue, at, "unknown feature kind code");
  at = r.pos();
  const std::uint32_t pad = r.u32();
  if (pad > 1) throw ParseError(ParseError::Kind::BadValue, at, "unknown padding code");
  at = r.pos();
  const double stride = r.f64();
  if (!(stride > 0) || !std::isfinite(stride))
    throw ParseError(ParseError::Kind::BadValue, at, "bad cell stride");
  if (static_cast<Family>(family) != Family::TemplatePyramid &&
      static_cast<std::uint64_t>(tw) * th * d * s > (1ull << 31))
    throw ParseError(ParseError::Kind::MalformedHeader, at, "model too large");
  MssModel m = MssModel::zeros(static_cast<Family>(family), k, s, d, {tw, th}, stride,
                               static_cast<Padding>(pad), static_cast<FeatureKind>(kind));
  for (int c = 0; c < k; ++c) {
    m.biases[c] = r.f32();
    r.f32_block(m.weights[c]);
  }
  if (r.remaining() != 0)
    throw ParseError(ParseError::Kind::MalformedHeader, r.pos(), "trailing bytes after model");
  for (int c = 0; c < k; ++c) {
    bool ok = std::isfinite(m.biases[c]);
    for (float v : m.weights[c]) ok = ok && std::isfinite(v);
    if (!ok) throw ParseError(ParseError::Kind::BadValue, 0, "non-finite model weight");
  }
  return m;
}

void save_model(const MssModel& model, const std::filesystem::path& path) {
  detail::write_file(path, encode_model(model));
}

MssModel load_model(const std::filesystem::path& path) { return decode_model(detail::read_file(path)); }

}  // namespace mss
