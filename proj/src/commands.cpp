#include "mss/commands.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "mss/binary_io.hpp"
#include "mss/dataset.hpp"
#include "mss/detect.hpp"
#include "mss/error.hpp"
#include "mss/eval.hpp"
#include "mss/model.hpp"
#include "mss/pyramid.hpp"

namespace mss {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
  if (!f) throw Error("write failed for " + path.string());
}

void require(const fs::path& p, const char* flag) {
  if (p.empty()) throw Error(std::string("missing required option ") + flag);
}

bool is_pyramid_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  char magic[7] = {};
  f.read(magic, 7);
  return f.gcount() == 7 && std::string(magic, 7) == std::string("MSSFP1\0", 7);
}

}  // namespace

void apply_desk_preset(RunConfig& config) {
  config.detector.train.initial_negatives = 500;
  config.detector.train.round_cap = 500;
}

int cmd_synth(const RunConfig& config, std::ostream& out, std::ostream&) {
  require(config.out, "--out");
  if (config.count < 0) throw Error("--count must be non-negative");
  SynthSpec spec = config.spec.empty() ? SynthSpec{} : parse_synth_spec(read_text(config.spec));
  if (config.seed) spec.scene.seed = *config.seed;
  const Dataset data = synthesize(spec, config.count);
  const Split split = split_indices(config.count, spec.scene.seed);
  save_dataset(data, split, config.out);
  write_text(config.out / "spec.txt", format_synth_spec(spec));
  out << "wrote " << data.size() << " scenes with " << data.object_count() << " objects to " << config.out.string()
      << " (" << split.train.size() << " train, " << split.test.size() << " test)\n";
  return 0;
}

int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err) {
  require(config.data, "--data");
  require(config.out, "--out");
  DetectorConfig det = config.detector;
  if (config.seed) det.train.seed = *config.seed;
  const Dataset train = load_dataset(config.data, "train");
  fs::create_directories(config.out);
  const TrainOutcome res = train_detector(train, det, [&](const RoundLog& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "round %d: pool %zu, added %d, train AP %.4f\n", r.round, r.pool_size,
                  r.additions, r.train_ap);
    out << buf << std::flush;
  });
  for (const auto& w : res.warnings) err << "warning: " << w << "\n";
  save_model(res.model, config.out / "model.mssm");
  write_text(config.out / "mining_log.csv", format_mining_log(res.log));
  out << "trained " << to_string(det.kind) << " on " << res.positives << " positives; template "
      << res.model.dims.width << "x" << res.model.dims.height << " cells; model written to "
      << (config.out / "model.mssm").string() << "\n";
  return 0;
}

int cmd_detect(const RunConfig& config, std::ostream& out, std::ostream& err) {
  require(config.model, "--model");
  const MssModel model = load_model(config.model);
  const DetectOptions opts{config.threshold, config.detector.nms};
  std::string text;
  if (!config.input.empty()) {
    const std::string id = config.input.stem().string();
    std::vector<Detection> dets;
    if (is_pyramid_file(config.input)) {
      // Imported features go straight to scoring.
      dets = detect(import_pyramid(config.input), model, opts);
    } else {
      dets = detect_image(load_image(config.input), model, opts);
    }
    text = format_detections(id, dets);
  } else if (!config.data.empty()) {
    const Dataset data = load_dataset(config.data, config.subset);
    for (std::size_t i = 0; i < data.size(); ++i)
      text += format_detections(data.names[i], detect_image(data.images[i], model, opts));
  } else {
    throw Error("detect needs --input or --data");
  }
  if (config.out.empty()) {
    out << text;
  } else {
    write_text(config.out, text);
    err << "detections written to " << config.out.string() << "\n";
  }
  return 0;
}

int cmd_eval(const RunConfig& config, std::ostream& out, std::ostream& err) {
  require(config.detections, "--detections");
  fs::path ann = config.annotations;
  if (ann.empty() && !config.data.empty()) ann = config.data / "annotations.txt";
  require(ann, "--annotations");

  // Images: every annotated image, every image with detections and, when a
  // dataset is given, every image of the evaluated subset.
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<Box>> truth;
  std::vector<std::vector<Detection>> dets;
  const auto slot = [&](const std::string& id) {
    auto [it, fresh] = index.emplace(id, truth.size());
    if (fresh) {
      truth.emplace_back();
      dets.emplace_back();
    }
    return it->second;
  };
  std::map<std::string, std::vector<Box>> all_truth;
  for (auto& [id, boxes] : load_truth(ann)) all_truth[id] = std::move(boxes);
  if (!config.data.empty() && config.subset != "all") {
    std::istringstream names(read_text(config.data / (config.subset + ".txt")));
    std::string n;
    while (names >> n) {
      const std::size_t s = slot(n);
      if (auto it = all_truth.find(n); it != all_truth.end()) truth[s] = it->second;
    }
  } else {
    for (const auto& [id, boxes] : all_truth) truth[slot(id)] = boxes;
  }
  for (auto& d : parse_detections(read_text(config.detections))) {
    if (!config.data.empty() && config.subset != "all" && !index.count(d.image_id)) {
      err << "warning: detection for image '" << d.image_id << "' outside the evaluated subset ignored\n";
      continue;
    }
    const std::size_t s = slot(d.image_id);
    if (truth[s].empty())
      if (auto it = all_truth.find(d.image_id); it != all_truth.end()) truth[s] = it->second;
    dets[s].push_back(d.det);
  }
  const PRCurve curve =
      average_precision(dets, truth, config.overlap, config.continuous ? ApMode::Continuous : ApMode::Voc11);
  if (!config.out.empty()) write_text(config.out, format_pr_csv(curve));
  char buf[64];
  std::snprintf(buf, sizeof buf, "AP %.4f\n", curve.ap);
  out << buf;
  return 0;
}

int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream&) {
  require(config.model, "--model");
  require(config.out, "--out");
  const MssModel model = load_model(config.model);
  fs::create_directories(config.out);
  if (model.family == Family::Mss) {
    const WeightReport rep = weight_analysis(model);
    write_text(config.out / "weights.csv", format_weight_csv(rep));
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "positive weight in-scale %.4f (sd %.4f), out-of-scale %.4f (sd %.4f); %d untrained classes\n",
                  rep.mean_pos_in, rep.std_pos_in, rep.mean_pos_out, rep.std_pos_out, rep.excluded);
    out << buf;
  }
  for (int k = 0; k < model.classes; ++k) {
    const auto maps = template_heatmap(model, k);
    for (std::size_t s = 0; s < maps.size(); ++s)
      save_pgm(maps[s], config.out / ("class" + std::to_string(k) + "_level" + std::to_string(s) + ".pgm"));
  }
  out << "heatmaps written to " << config.out.string() << "\n";
  return 0;
}

int cmd_export_pyramid(const RunConfig& config, std::ostream& out, std::ostream&) {
  require(config.input, "--input");
  require(config.out, "--out");
  const DetectorConfig& d = config.detector;
  const FeaturePyramid pyr = build_pyramid(load_image(config.input), d.levels, d.cell_size, d.effective_padding());
  if (pyr.truncated) out << "note: image too small; pyramid has " << pyr.level_count() << " levels\n";
  export_pyramid(pyr, config.out);
  out << "pyramid with " << pyr.level_count() << " levels written to " << config.out.string() << "\n";
  return 0;
}

}  // namespace mss
