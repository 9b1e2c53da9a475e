#include "mss/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "mss/error.hpp"
#include "mss/labels.hpp"

namespace mss {

namespace fs = std::filesystem;

Dataset Dataset::subset(std::span<const int> indices) const {
  Dataset out;
  for (int i : indices) {
    out.names.push_back(names.at(i));
    out.images.push_back(images.at(i));
    out.boxes.push_back(boxes.at(i));
  }
  return out;
}

std::size_t Dataset::object_count() const {
  std::size_t n = 0;
  for (const auto& b : boxes) n += b.size();
  return n;
}

SynthSpec parse_synth_spec(std::string_view text) {
  SynthSpec spec;
  for (const auto& kv : parse_key_value_lines(text)) {
    if (apply_scene_key(spec.scene, kv)) continue;
    double v = 0;
    try {
      std::size_t used = 0;
      v = std::stod(kv.value, &used);
      if (used != kv.value.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(ParseError::Kind::BadValue, kv.line, "bad number for '" + kv.key + "'");
    }
    if (kv.key == "objects_min") spec.objects_min = static_cast<int>(v);
    else if (kv.key == "objects_max") spec.objects_max = static_cast<int>(v);
    else if (kv.key == "scale_min") spec.scale_min = v;
    else if (kv.key == "scale_max") spec.scale_max = v;
    else if (kv.key == "empty_fraction") spec.empty_fraction = v;
    else throw ParseError(ParseError::Kind::BadValue, kv.line, "unknown key '" + kv.key + "'");
  }
  if (spec.objects_min < 0 || spec.objects_max < spec.objects_min)
    throw Error("need 0 <= objects_min <= objects_max");
  if (!(spec.scale_min > 0) || spec.scale_max < spec.scale_min) throw Error("need 0 < scale_min <= scale_max");
  if (!(spec.empty_fraction >= 0 && spec.empty_fraction <= 1)) throw Error("empty_fraction must be in [0,1]");
  return spec;
}

std::string format_synth_spec(const SynthSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  out << format_scene_spec(spec.scene) << "objects_min = " << spec.objects_min << "\n"
      << "objects_max = " << spec.objects_max << "\n"
      << "scale_min = " << spec.scale_min << "\n"
      << "scale_max = " << spec.scale_max << "\n"
      << "empty_fraction = " << spec.empty_fraction << "\n";
  return out.str();
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

bool touches(const Box& a, const Box& b, double margin) {
  return a.x1 - margin < b.x2 && b.x1 - margin < a.x2 && a.y1 - margin < b.y2 && b.y1 - margin < a.y2;
}

std::string scene_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%04d", i);
  return buf;
}

}  // namespace

SceneSpec scene_spec_for(const SynthSpec& spec, int index) {
  SceneSpec s = spec.scene;
  s.objects.clear();
  const std::uint64_t seed = splitmix(spec.scene.seed ^ splitmix(static_cast<std::uint64_t>(index)));
  s.seed = splitmix(seed);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < spec.empty_fraction) return s;
  const int count = spec.objects_min + static_cast<int>(unit(rng) * (spec.objects_max - spec.objects_min + 1));
  const double lo = std::log(spec.scale_min), hi = std::log(spec.scale_max);
  std::vector<Box> placed;
  for (int i = 0; i < std::min(count, spec.objects_max); ++i) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      ObjectPlacement p;
      p.scale = std::exp(lo + (hi - lo) * unit(rng));
      p.cx = unit(rng) * s.width;
      p.cy = unit(rng) * s.height;
      const Box b = placement_box(s, p);
      if (b.x1 < 0 || b.y1 < 0 || b.x2 > s.width || b.y2 > s.height) continue;
      if (std::any_of(placed.begin(), placed.end(), [&](const Box& o) { return touches(b, o, 4); })) continue;
      placed.push_back(b);
      s.objects.push_back(p);
      break;
    }
  }
  return s;
}

Dataset synthesize(const SynthSpec& spec, int count) {
  if (count < 0) throw Error("scene count must be non-negative");
  Dataset out;
  for (int i = 0; i < count; ++i) {
    Scene scene = generate_scene(scene_spec_for(spec, i));
    out.names.push_back(scene_name(i));
    out.images.push_back(std::move(scene.image));
    out.boxes.push_back(std::move(scene.boxes));
  }
  return out;
}

Split split_indices(int n, std::uint64_t seed, double train_fraction) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::lround(train_fraction * n));
  Split s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
  if (!f) throw Error("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> out;
  std::istringstream in(read_text(path));
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace

void save_dataset(const Dataset& data, const Split& split, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  std::vector<Annotation> ann;
  for (std::size_t i = 0; i < data.size(); ++i) {
    save_pgm(data.images[i], dir / (data.names[i] + ".pgm"));
    for (const Box& b : data.boxes[i]) ann.push_back({data.names[i] + ".pgm", b, 0});
  }
  write_text(dir / "annotations.txt", format_annotations(ann));
  const auto manifest = [&](const std::vector<int>& idx) {
    std::string s;
    for (int i : idx) s += data.names.at(i) + "\n";
    return s;
  };
  write_text(dir / "train.txt", manifest(split.train));
  write_text(dir / "test.txt", manifest(split.test));
}

std::vector<std::pair<std::string, std::vector<Box>>> load_truth(const fs::path& annotations) {
  std::vector<std::pair<std::string, std::vector<Box>>> out;
  std::map<std::string, std::size_t> at;
  for (const Annotation& a : parse_annotations(read_text(annotations))) {
    const std::string id = fs::path(a.image).stem().string();
    auto [it, fresh] = at.emplace(id, out.size());
    if (fresh) out.push_back({id, {}});
    out[it->second].second.push_back(a.box);
  }
  return out;
}

Dataset load_dataset(const fs::path& dir, std::string_view subset) {
  std::vector<std::string> names;
  if (subset == "all") {
    for (const char* m : {"train.txt", "test.txt"})
      for (auto& n : read_lines(dir / m)) names.push_back(std::move(n));
    std::sort(names.begin(), names.end());
  } else if (subset == "train" || subset == "test") {
    names = read_lines(dir / (std::string(subset) + ".txt"));
  } else {
    throw Error("unknown dataset subset '" + std::string(subset) + "'");
  }
  std::map<std::string, std::vector<Box>> truth;
  for (auto& [id, boxes] : load_truth(dir / "annotations.txt")) truth[id] = std::move(boxes);
  Dataset out;
  for (const auto& n : names) {
    out.names.push_back(n);
    out.images.push_back(load_image(dir / (n + ".pgm")));
    auto it = truth.find(n);
    out.boxes.push_back(it == truth.end() ? std::vector<Box>{} : it->second);
  }
  return out;
}

}  // namespace mss
