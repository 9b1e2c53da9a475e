#include "mss/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mss/error.hpp"

namespace mss {

namespace {

constexpr float kDark = 0.1f;
constexpr float kBright = 0.9f;

struct PixelBox {
  int x1, y1, x2, y2;
  Box box() const { return {double(x1), double(y1), double(x2), double(y2)}; }
  bool intersects(const PixelBox& o, int margin) const {
    return x1 - margin < o.x2 && o.x1 - margin < x2 && y1 - margin < o.y2 && o.y1 - margin < y2;
  }
};

void draw_checker(Image& img, const PixelBox& b) {
  const int mx = b.x1 + (b.x2 - b.x1) / 2;
  const int my = b.y1 + (b.y2 - b.y1) / 2;
  for (int y = b.y1; y < b.y2; ++y)
    for (int x = b.x1; x < b.x2; ++x) img.at(x, y) = ((x < mx) == (y < my)) ? kDark : kBright;
}

int side_pixels(const SceneSpec& spec, double scale) {
  return std::max(4, static_cast<int>(std::lround(spec.object_size * scale)));
}

// Grounded rule: bottom edge ground_ratio * side below the horizon.
PixelBox grounded_box(const SceneSpec& spec, double cx, int side) {
  const int x1 = static_cast<int>(std::lround(cx - 0.5 * side));
  const int bottom = static_cast<int>(std::lround(horizon_row(spec) + spec.ground_ratio * side));
  return {x1, bottom - side, x1 + side, bottom};
}

PixelBox free_box(double cx, double cy, int side) {
  const int x1 = static_cast<int>(std::lround(cx - 0.5 * side));
  const int y1 = static_cast<int>(std::lround(cy - 0.5 * side));
  return {x1, y1, x1 + side, y1 + side};
}

bool inside(const SceneSpec& spec, const PixelBox& b) {
  return b.x1 >= 0 && b.y1 >= 0 && b.x2 <= spec.width && b.y2 <= spec.height;
}

void render_grounded_background(Image& img, int horizon, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> sky_noise(-0.01f, 0.01f);
  std::uniform_real_distribution<float> ground_noise(-0.06f, 0.06f);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      float v;
      if (y < horizon) {
        v = 0.85f - 0.15f * static_cast<float>(y) / std::max(1, horizon) + sky_noise(rng);
      } else {
        // Perspective stripes: constant spacing on the ground plane.
        const double depth = 240.0 / (y - horizon + 2.0);
        const bool band = static_cast<long>(std::floor(depth)) % 2 == 0;
        v = (band ? 0.5f : 0.35f) + ground_noise(rng);
      }
      img.at(x, y) = v;
    }
  }
  for (int y = horizon - 1; y <= horizon; ++y)
    if (y >= 0 && y < img.height)
      for (int x = 0; x < img.width; ++x) img.at(x, y) = 0.15f;
}

void render_noise_background(Image& img, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> noise(0.25f, 0.75f);
  for (float& v : img.pixels) v = noise(rng);
}

}  // namespace

Box placement_box(const SceneSpec& spec, const ObjectPlacement& p) {
  const int side = side_pixels(spec, p.scale);
  return (spec.mode == ContextMode::Grounded ? grounded_box(spec, p.cx, side) : free_box(p.cx, p.cy, side)).box();
}

int horizon_row(const SceneSpec& spec) {
  return static_cast<int>(std::lround(spec.horizon * spec.height));
}

Scene generate_scene(const SceneSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0) throw Error("scene canvas must be non-empty");
  if (!(spec.object_size > 0)) throw Error("object_size must be positive");
  std::mt19937_64 rng(spec.seed);
  Scene scene;
  scene.image = Image(spec.width, spec.height);
  const bool grounded = spec.mode == ContextMode::Grounded;

  std::vector<PixelBox> placed;
  for (const auto& p : spec.objects) {
    if (!(p.scale > 0)) throw Error("object scale factor must be positive");
    const int side = side_pixels(spec, p.scale);
    const PixelBox b = grounded ? grounded_box(spec, p.cx, side) : free_box(p.cx, p.cy, side);
    if (!inside(spec, b)) throw Error("placement out of canvas");
    placed.push_back(b);
  }

  if (grounded)
    render_grounded_background(scene.image, horizon_row(spec), rng);
  else
    render_noise_background(scene.image, rng);

  // Decoys: rejection-sampled so they never touch an object or each other.
  std::vector<PixelBox> decoys;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lo = std::log(spec.clutter_scale_min), hi = std::log(spec.clutter_scale_max);
  for (int c = 0; c < spec.clutter; ++c) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      const int side = side_pixels(spec, std::exp(lo + (hi - lo) * unit(rng)));
      const double cx = unit(rng) * spec.width;
      PixelBox b;
      if (grounded) {
        // Even decoys straddle the horizon, too large for their depth. Odd
        // decoys stand on the ground where the rule asks for at least twice
        // their size, so only the scene layout gives them away.
        double bottom;
        if (c % 2 == 0) {
          bottom = horizon_row(spec) + (-0.6 + 1.2 * unit(rng)) * side;
        } else {
          const double lo_b = horizon_row(spec) + 2.0 * spec.ground_ratio * side;
          if (lo_b > spec.height) continue;
          bottom = lo_b + (spec.height - lo_b) * unit(rng);
        }
        const int y2 = static_cast<int>(std::lround(bottom));
        const int x1 = static_cast<int>(std::lround(cx - 0.5 * side));
        b = {x1, y2 - side, x1 + side, y2};
      } else {
        b = free_box(cx, unit(rng) * spec.height, side);
      }
      if (!inside(spec, b)) continue;
      const auto clash = [&](const PixelBox& o) { return b.intersects(o, 2); };
      if (std::any_of(placed.begin(), placed.end(), clash) || std::any_of(decoys.begin(), decoys.end(), clash))
        continue;
      decoys.push_back(b);
      break;
    }
  }

  for (const auto& b : decoys) draw_checker(scene.image, b);
  for (const auto& b : placed) {
    draw_checker(scene.image, b);
    scene.boxes.push_back(b.box());
  }
  for (float& v : scene.image.pixels) v = std::clamp(v, 0.0f, 1.0f);
  return scene;
}

std::string to_string(ContextMode mode) {
  return mode == ContextMode::Grounded ? "grounded" : "context-free";
}

ContextMode parse_context_mode(std::string_view s) {
  if (s == "grounded") return ContextMode::Grounded;
  if (s == "context-free" || s == "context_free") return ContextMode::ContextFree;
  throw Error("unknown context mode '" + std::string(s) + "'");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const KeyValue& kv) {
  try {
    std::size_t used = 0;
    const double v = std::stod(kv.value, &used);
    if (used != kv.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(ParseError::Kind::BadValue, kv.line, "bad number for '" + kv.key + "'");
  }
}

std::uint64_t to_u64(const KeyValue& kv) {
  try {
    std::size_t used = 0;
    if (!kv.value.empty() && kv.value[0] == '-') throw std::invalid_argument("negative");
    const auto v = std::stoull(kv.value, &used);
    if (used != kv.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(ParseError::Kind::BadValue, kv.line, "bad unsigned integer for '" + kv.key + "'");
  }
}

}  // namespace

std::vector<KeyValue> parse_key_value_lines(std::string_view text) {
  std::vector<KeyValue> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string t = trim(line);
    if (t.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError(ParseError::Kind::MalformedHeader, line_no, "expected key = value");
    out.push_back({line_no, trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1))});
    if (end == text.size()) break;
  }
  return out;
}

bool apply_scene_key(SceneSpec& spec, const KeyValue& kv) {
  const auto& k = kv.key;
  if (k == "width") spec.width = static_cast<int>(to_double(kv));
  else if (k == "height") spec.height = static_cast<int>(to_double(kv));
  else if (k == "mode") spec.mode = parse_context_mode(kv.value);
  else if (k == "clutter") spec.clutter = static_cast<int>(to_double(kv));
  else if (k == "seed") spec.seed = to_u64(kv);
  else if (k == "object_size") spec.object_size = to_double(kv);
  else if (k == "horizon") spec.horizon = to_double(kv);
  else if (k == "ground_ratio") spec.ground_ratio = to_double(kv);
  else if (k == "clutter_scale_min") spec.clutter_scale_min = to_double(kv);
  else if (k == "clutter_scale_max") spec.clutter_scale_max = to_double(kv);
  else if (k == "object") {
    std::istringstream in(kv.value);
    ObjectPlacement p;
    if (!(in >> p.cx >> p.cy >> p.scale))
      throw ParseError(ParseError::Kind::BadValue, kv.line, "object needs 'cx cy scale'");
    spec.objects.push_back(p);
  } else {
    return false;
  }
  return true;
}

SceneSpec parse_scene_spec(std::string_view text) {
  SceneSpec spec;
  for (const auto& kv : parse_key_value_lines(text))
    if (!apply_scene_key(spec, kv))
      throw ParseError(ParseError::Kind::BadValue, kv.line, "unknown key '" + kv.key + "'");
  return spec;
}

std::string format_scene_spec(const SceneSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  out << "width = " << spec.width << "\n"
      << "height = " << spec.height << "\n"
      << "mode = " << to_string(spec.mode) << "\n"
      << "clutter = " << spec.clutter << "\n"
      << "seed = " << spec.seed << "\n"
      << "object_size = " << spec.object_size << "\n"
      << "horizon = " << spec.horizon << "\n"
      << "ground_ratio = " << spec.ground_ratio << "\n"
      << "clutter_scale_min = " << spec.clutter_scale_min << "\n"
      << "clutter_scale_max = " << spec.clutter_scale_max << "\n";
  for (const auto& p : spec.objects) out << "object = " << p.cx << " " << p.cy << " " << p.scale << "\n";
  return out.str();
}

}  // namespace mss
