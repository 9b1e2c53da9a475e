#include "mss/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "mss/error.hpp"

namespace mss {

namespace {

using Kind = ParseError::Kind;

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  int read_uint(const char* field) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size())
      throw ParseError(Kind::MalformedHeader, pos_, std::string("missing ") + field);
    if (!std::isdigit(bytes_[pos_]))
      throw ParseError(Kind::MalformedHeader, pos_, std::string("expected digits for ") + field);
    long long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > (1 << 24))
        throw ParseError(Kind::MalformedHeader, pos_, std::string(field) + " out of range");
      ++pos_;
    }
    return static_cast<int>(v);
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Image decode_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P')
    throw ParseError(Kind::UnsupportedMagic, 0, "not a PNM file");
  int channels = 0;
  if (bytes[1] == '5')
    channels = 1;
  else if (bytes[1] == '6')
    channels = 3;
  else
    throw ParseError(Kind::UnsupportedMagic, 0, "unsupported PNM magic P" + std::string(1, static_cast<char>(bytes[1])));

  HeaderReader rd(bytes);
  rd.advance(2);
  const int width = rd.read_uint("width");
  const int height = rd.read_uint("height");
  const std::size_t maxval_at = rd.pos();
  const int maxval = rd.read_uint("maxval");
  if (width <= 0 || height <= 0)
    throw ParseError(Kind::MalformedHeader, maxval_at, "zero image dimension");
  if (maxval <= 0 || maxval > 255)
    throw ParseError(Kind::MalformedHeader, maxval_at, "maxval must be in 1..255");
  if (rd.pos() >= bytes.size() || !std::isspace(bytes[rd.pos()]))
    throw ParseError(Kind::MalformedHeader, rd.pos(), "expected whitespace after maxval");
  rd.advance(1);

  const std::size_t need = static_cast<std::size_t>(width) * height * channels;
  const std::size_t have = bytes.size() - rd.pos();
  if (have < need)
    throw ParseError(Kind::TruncatedPayload, bytes.size(),
                     "payload has " + std::to_string(have) + " of " + std::to_string(need) + " bytes");

  Image img(width, height);
  const std::uint8_t* p = bytes.data() + rd.pos();
  const double inv = 1.0 / maxval;
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    double v;
    if (channels == 1) {
      v = p[i] * inv;
    } else {
      const std::uint8_t* rgb = p + 3 * i;
      v = (0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2]) * inv;
    }
    img.pixels[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
  return img;
}

Image load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open image " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_pnm(bytes);
}

std::vector<std::uint8_t> encode_pgm(const Image& img) {
  const std::string header =
      "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.pixels.size());
  for (float v : img.pixels) {
    const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
    out.push_back(static_cast<std::uint8_t>(std::lround(c * 255.0)));
  }
  return out;
}

void save_pgm(const Image& img, const std::filesystem::path& path) {
  const auto bytes = encode_pgm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write image " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

namespace {

struct Tap {
  int first = 0;
  std::vector<double> weights;
};

// Normalised triangle-filter taps for every output index along one axis.
std::vector<Tap> make_taps(int in_len, int out_len, double factor) {
  const double radius = std::max(1.0, 1.0 / factor);
  std::vector<Tap> taps(static_cast<std::size_t>(out_len));
  for (int o = 0; o < out_len; ++o) {
    const double c = (o + 0.5) / factor;
    const int lo = std::max(0, static_cast<int>(std::floor(c - radius)));
    const int hi = std::min(in_len - 1, static_cast<int>(std::ceil(c + radius)));
    Tap& t = taps[static_cast<std::size_t>(o)];
    double sum = 0;
    for (int i = lo; i <= hi; ++i) {
      const double w = std::max(0.0, 1.0 - std::abs(i + 0.5 - c) / radius);
      if (t.weights.empty() && w == 0.0) continue;
      if (t.weights.empty()) t.first = i;
      t.weights.push_back(w);
      sum += w;
    }
    while (!t.weights.empty() && t.weights.back() == 0.0) t.weights.pop_back();
    if (t.weights.empty()) {
      // Output centre beyond the last source pixel: nearest edge pixel.
      t.first = std::clamp(static_cast<int>(std::floor(c)), 0, in_len - 1);
      t.weights = {1.0};
      sum = 1.0;
    }
    for (double& w : t.weights) w /= sum;
  }
  return taps;
}

}  // namespace

Image resize(const Image& img, double factor) {
  if (!(factor > 0)) throw Error("resize factor must be positive");
  if (img.empty()) throw Error("resize of an empty image");
  const int ow = std::max(1, static_cast<int>(std::lround(img.width * factor)));
  const int oh = std::max(1, static_cast<int>(std::lround(img.height * factor)));
  const auto tx = make_taps(img.width, ow, factor);
  const auto ty = make_taps(img.height, oh, factor);

  std::vector<double> tmp(static_cast<std::size_t>(ow) * img.height);
  for (int y = 0; y < img.height; ++y) {
    const float* row = img.pixels.data() + static_cast<std::size_t>(y) * img.width;
    for (int x = 0; x < ow; ++x) {
      const Tap& t = tx[static_cast<std::size_t>(x)];
      double acc = 0;
      for (std::size_t k = 0; k < t.weights.size(); ++k) acc += t.weights[k] * row[t.first + k];
      tmp[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  Image out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    const Tap& t = ty[static_cast<std::size_t>(y)];
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      for (std::size_t k = 0; k < t.weights.size(); ++k)
        acc += t.weights[k] * tmp[static_cast<std::size_t>(t.first + static_cast<int>(k)) * ow + x];
      out.at(x, y) = static_cast<float>(std::clamp(acc, 0.0, 1.0));
    }
  }
  return out;
}

Image flip_horizontal(const Image& img) {
  Image out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) out.at(x, y) = img.at(img.width - 1 - x, y);
  return out;
}

}  // namespace mss
