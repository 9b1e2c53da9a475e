#include "mss/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "mss/error.hpp"
#include "mss/labels.hpp"

namespace mss {

PRCurve average_precision(std::span<const std::vector<Detection>> detections,
                          std::span<const std::vector<Box>> truth, double overlap_req, ApMode mode) {
  if (detections.size() != truth.size()) throw Error("average_precision: one detection list per image required");
  std::size_t n_truth = 0;
  for (const auto& t : truth) n_truth += t.size();
  if (n_truth == 0) throw Error("average precision is undefined without ground truth");

  struct Ref {
    std::size_t image;
    const Detection* det;
  };
  std::vector<Ref> all;
  for (std::size_t i = 0; i < detections.size(); ++i)
    for (const Detection& d : detections[i]) all.push_back({i, &d});
  std::stable_sort(all.begin(), all.end(), [](const Ref& a, const Ref& b) {
    if (a.det->score != b.det->score) return a.det->score > b.det->score;
    if (a.image != b.image) return a.image < b.image;
    if (a.det->box.x1 != b.det->box.x1) return a.det->box.x1 < b.det->box.x1;
    return a.det->box.y1 < b.det->box.y1;
  });

  std::vector<std::vector<bool>> used(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) used[i].assign(truth[i].size(), false);

  PRCurve curve;
  curve.overlap = overlap_req;
  std::size_t tp = 0;
  for (std::size_t r = 0; r < all.size(); ++r) {
    const auto& gts = truth[all[r].image];
    // VOC rule: match against the best-overlapping box; if it is taken the
    // detection is a duplicate.
    int best = -1;
    double best_ov = 0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double ov = overlap(all[r].det->box, gts[g]);
      if (ov > best_ov) {
        best = static_cast<int>(g);
        best_ov = ov;
      }
    }
    if (best >= 0 && best_ov >= overlap_req && !used[all[r].image][static_cast<std::size_t>(best)]) {
      used[all[r].image][static_cast<std::size_t>(best)] = true;
      ++tp;
    }
    curve.points.push_back({all[r].det->score, static_cast<double>(tp) / static_cast<double>(r + 1),
                            static_cast<double>(tp) / static_cast<double>(n_truth)});
  }

  double ap = 0;
  if (mode == ApMode::Voc11) {
    for (int i = 0; i <= 10; ++i) {
      const double t = i / 10.0;
      double p = 0;
      for (const PRPoint& pt : curve.points)
        if (pt.recall >= t - 1e-12) p = std::max(p, pt.precision);
      ap += p / 11.0;
    }
  } else {
    double prev = 0;
    for (const PRPoint& pt : curve.points) {
      ap += (pt.recall - prev) * pt.precision;
      prev = pt.recall;
    }
  }
  curve.ap = std::clamp(ap, 0.0, 1.0);
  return curve;
}

std::string format_pr_csv(const PRCurve& curve) {
  std::string out = "threshold,precision,recall\n";
  char buf[128];
  for (const PRPoint& p : curve.points) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", p.threshold, p.precision, p.recall);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "AP,%.9g\n", curve.ap);
  out += buf;
  return out;
}

namespace {

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
  mean = sd = 0;
  if (v.empty()) return;
  mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace

WeightReport weight_analysis(const MssModel& model) {
  if (model.family != Family::Mss) throw Error("weight analysis needs an MSS model");
  WeightReport rep;
  std::vector<double> pin, pout, nin, nout;
  const std::size_t block = model.level_block(0);
  for (int k = 0; k < model.classes; ++k) {
    ClassWeightShare c;
    c.cls = k;
    c.populated = model.populated(k);
    if (!c.populated) {
      ++rep.excluded;
      rep.classes.push_back(c);
      continue;
    }
    double pos[2] = {0, 0}, neg[2] = {0, 0};  // [in, out]
    const auto& w = model.weights[k];
    for (std::size_t j = 0; j < w.size(); ++j) {
      const int out = static_cast<int>(j / block) == k ? 0 : 1;
      if (w[j] > 0) pos[out] += w[j];
      else neg[out] -= w[j];
    }
    const double pt = pos[0] + pos[1], nt = neg[0] + neg[1];
    if (pt > 0) {
      c.pos_in = pos[0] / pt;
      c.pos_out = pos[1] / pt;
    }
    if (nt > 0) {
      c.neg_in = neg[0] / nt;
      c.neg_out = neg[1] / nt;
    }
    pin.push_back(c.pos_in);
    pout.push_back(c.pos_out);
    nin.push_back(c.neg_in);
    nout.push_back(c.neg_out);
    rep.classes.push_back(c);
  }
  mean_std(pin, rep.mean_pos_in, rep.std_pos_in);
  mean_std(pout, rep.mean_pos_out, rep.std_pos_out);
  mean_std(nin, rep.mean_neg_in, rep.std_neg_in);
  mean_std(nout, rep.mean_neg_out, rep.std_neg_out);
  return rep;
}

std::string format_weight_csv(const WeightReport& r) {
  std::string out = "class,populated,pos_in,pos_out,neg_in,neg_out\n";
  char buf[256];
  for (const auto& c : r.classes) {
    if (c.populated)
      std::snprintf(buf, sizeof buf, "%d,1,%.9g,%.9g,%.9g,%.9g\n", c.cls, c.pos_in, c.pos_out, c.neg_in, c.neg_out);
    else
      std::snprintf(buf, sizeof buf, "%d,0,,,,\n", c.cls);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "mean,,%.9g,%.9g,%.9g,%.9g\nstd,,%.9g,%.9g,%.9g,%.9g\nexcluded,%d,,,,\n",
                r.mean_pos_in, r.mean_pos_out, r.mean_neg_in, r.mean_neg_out, r.std_pos_in, r.std_pos_out,
                r.std_neg_in, r.std_neg_out, r.excluded);
  out += buf;
  return out;
}

ScaleSpread scale_spread(std::span<const std::vector<Box>> truth, const PyramidGeometry& geom, TemplateDims dims) {
  ScaleSpread out;
  out.histogram.assign(geom.scales.size(), 0);
  int total = 0;
  for (const auto& boxes : truth)
    for (const Box& b : boxes) {
      const auto f = overlap_profile(boxes, b.center_x(), b.center_y(), dims, geom);
      ++out.histogram[static_cast<std::size_t>(best_fit_level(f))];
      ++total;
    }
  if (total == 0) throw Error("scale spread needs at least one object");
  for (int n : out.histogram)
    if (n > 0) {
      const double p = static_cast<double>(n) / total;
      out.entropy -= p * std::log(p);
    }
  return out;
}

std::vector<Image> template_heatmap(const MssModel& model, int cls) {
  if (cls < 0 || cls >= model.classes) throw Error("template_heatmap: class out of range");
  const TemplateDims dk = model.class_dims(cls);
  const int d = model.channels;
  const std::size_t block = model.level_block(cls);
  const int blocks = static_cast<int>(model.weights[cls].size() / block);
  std::vector<Image> out;
  for (int s = 0; s < blocks; ++s) {
    Image img(dk.width, dk.height, 0.0f);
    const float* w = model.weights[cls].data() + s * block;
    float peak = 0;
    for (int c = 0; c < dk.cells(); ++c) {
      float m = 0;
      for (int j = 0; j < d; ++j) m = std::max(m, w[c * d + j]);
      img.pixels[c] = m;
      peak = std::max(peak, m);
    }
    if (peak > 0)
      for (float& p : img.pixels) p /= peak;
    out.push_back(std::move(img));
  }
  return out;
}

}  // namespace mss
