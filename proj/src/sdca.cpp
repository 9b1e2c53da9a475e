#include "mss/sdca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mss/error.hpp"

namespace mss {

double dot(std::span<const double> w, std::span<const float> x) {
  const std::size_t n = x.size();
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 += w[i] * x[i];
    a1 += w[i + 1] * x[i + 1];
    a2 += w[i + 2] * x[i + 2];
    a3 += w[i + 3] * x[i + 3];
  }
  for (; i < n; ++i) a0 += w[i] * x[i];
  return (a0 + a1) + (a2 + a3);
}

double dot(std::span<const float> w, std::span<const float> x) {
  const std::size_t n = x.size();
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 += double(w[i]) * x[i];
    a1 += double(w[i + 1]) * x[i + 1];
    a2 += double(w[i + 2]) * x[i + 2];
    a3 += double(w[i + 3]) * x[i + 3];
  }
  for (; i < n; ++i) a0 += double(w[i]) * x[i];
  return (a0 + a1) + (a2 + a3);
}

namespace {

void axpy(double a, std::span<const float> x, std::span<double> w) {
  for (std::size_t i = 0; i < x.size(); ++i) w[i] += a * x[i];
}

}  // namespace

SdcaResult sdca_train(std::span<const std::span<const float>> samples, std::span<const std::int8_t> labels,
                      const SdcaOptions& options, std::span<const double> warm_alpha) {
  const std::size_t n = samples.size();
  if (n == 0 || labels.size() != n) throw Error("sdca_train: need one label per sample");
  if (!(options.c > 0)) throw Error("sdca_train: C must be positive");
  if (!(options.tolerance > 0)) throw Error("sdca_train: tolerance must be positive");
  const std::size_t dim = samples.front().size();
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (samples[i].size() != dim) throw Error("sdca_train: inconsistent descriptor lengths");
    for (float v : samples[i])
      if (!std::isfinite(v)) throw Error("sdca_train: non-finite feature value");
    if (labels[i] > 0) has_pos = true;
    else has_neg = true;
  }
  if (!has_pos || !has_neg) throw Error("sdca_train: need samples of both signs");

  const double c = options.c;
  const double lambda = 1.0 / (c * static_cast<double>(n));
  const double bm = options.bias_multiplier;

  // alpha in [0,1]; w = C * sum alpha_i y_i x_i (with the bias feature).
  std::vector<double> alpha(n, 0.0);
  std::vector<double> sq(n);
  std::vector<double> w(dim, 0.0);
  double wb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0;
    for (float v : samples[i]) s += double(v) * v;
    sq[i] = s + bm * bm;
    if (i < warm_alpha.size()) {
      alpha[i] = std::clamp(warm_alpha[i] / c, 0.0, 1.0);
      if (alpha[i] > 0) {
        const double a = alpha[i] * c * labels[i];
        axpy(a, samples[i], w);
        wb += a * bm;
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.seed);
  SdcaResult res;

  const auto evaluate = [&] {
    double wsq = wb * wb;
    for (double v : w) wsq += v * v;
    double loss = 0, asum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = labels[i] * (dot(w, samples[i]) + wb * bm);
      loss += std::max(0.0, 1.0 - m);
      asum += alpha[i];
    }
    res.primal = 0.5 * lambda * wsq + loss / n;
    res.dual = -0.5 * lambda * wsq + asum / n;
    res.gap = res.primal - res.dual;
  };

  while (res.iterations < options.max_iterations) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      if (res.iterations >= options.max_iterations) break;
      ++res.iterations;
      const double m = labels[i] * (dot(w, samples[i]) + wb * bm);
      const double next = std::clamp(alpha[i] + (1.0 - m) / (c * sq[i]), 0.0, 1.0);
      const double delta = next - alpha[i];
      if (delta == 0.0) continue;
      alpha[i] = next;
      const double a = delta * c * labels[i];
      axpy(a, samples[i], w);
      wb += a * bm;
    }
    ++res.epochs;
    evaluate();
    if (res.gap <= options.tolerance) {
      res.converged = true;
      break;
    }
  }
  if (res.epochs == 0) evaluate();

  res.w = std::move(w);
  res.bias = wb * bm;
  res.alpha.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.alpha[i] = alpha[i] * c;
  return res;
}

SdcaResult sdca_train(const std::vector<std::vector<float>>& positives,
                      const std::vector<std::vector<float>>& negatives, const SdcaOptions& options) {
  std::vector<std::span<const float>> xs;
  std::vector<std::int8_t> ys;
  for (const auto& p : positives) {
    xs.emplace_back(p);
    ys.push_back(1);
  }
  for (const auto& q : negatives) {
    xs.emplace_back(q);
    ys.push_back(-1);
  }
  return sdca_train(xs, ys, options);
}

}  // namespace mss
