#ifndef MSS_SDCA_HPP_
#define MSS_SDCA_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace mss {

struct SdcaOptions {
  double c = 0.01;                    // hinge-loss weight C
  long long max_iterations = 5'000'000;  // coordinate updates
  double tolerance = 1e-7;            // duality gap, per-sample-averaged units
  std::uint64_t seed = 0;
  double bias_multiplier = 10.0;      // value of the appended constant feature
};

struct SdcaResult {
  std::vector<double> w;
  double bias = 0;
  /// Dual variables in C units, each in [0, C].
  std::vector<double> alpha;
  /// Primal/dual of (lambda/2)|w|^2 + (1/n) sum hinge with lambda = 1/(C n);
  /// the same minimiser as (1/2)|w|^2 + C sum hinge, scaled by 1/(C n).
  double primal = 0;
  double dual = 0;
  double gap = 0;
  long long iterations = 0;
  int epochs = 0;
  bool converged = false;
};

/// Linear SVM with hinge loss by stochastic dual coordinate ascent. The bias
/// is learned as the weight of a constant feature and is regularised with
/// the rest. `labels` are +1/-1. `warm_alpha` (C units) seeds the dual;
/// entries beyond its length start at zero.
SdcaResult sdca_train(std::span<const std::span<const float>> samples, std::span<const std::int8_t> labels,
                      const SdcaOptions& options, std::span<const double> warm_alpha = {});

/// Convenience overload for owned descriptors.
SdcaResult sdca_train(const std::vector<std::vector<float>>& positives,
                      const std::vector<std::vector<float>>& negatives, const SdcaOptions& options);

/// Dot product with four independent accumulators.
double dot(std::span<const double> w, std::span<const float> x);
double dot(std::span<const float> w, std::span<const float> x);

}  // namespace mss

#endif  // MSS_SDCA_HPP_
