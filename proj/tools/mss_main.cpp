// Command-line front end: synth, train, detect, eval, analyze, export-pyramid.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "mss/commands.hpp"
#include "mss/error.hpp"

namespace {

void add_pyramid_flags(CLI::App* cmd, mss::RunConfig& cfg, std::string& padding) {
  cmd->add_option("--levels", cfg.detector.levels, "pyramid levels S")->check(CLI::PositiveNumber);
  cmd->add_option("--cell-size", cfg.detector.cell_size, "HOG cell size in pixels")->check(CLI::PositiveNumber);
  cmd->add_option("--padding", padding, "window padding: zero or replicate (default per family)")
      ->check(CLI::IsMember({"zero", "replicate"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-scale structure object detector"};
  app.require_subcommand(1);
  mss::RunConfig cfg;
  std::string family = "mss-ova";
  std::string padding;
  std::string template_cells;
  std::uint64_t seed = 0;
  bool desk = false;

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--spec", cfg.spec, "scene spec file (key = value lines)");
  synth->add_option("--count", cfg.count, "number of scenes")->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", seed, "overrides the spec seed");
  synth->add_option("--out", cfg.out, "output directory")->required();

  auto* train = app.add_subcommand("train", "train a detector with hard-negative mining");
  train->add_option("--data", cfg.data, "dataset directory")->required();
  train->add_option("--family", family, "baseline, template-pyramid, mss-ova or mss-ssvm")
      ->check(CLI::IsMember({"baseline", "template-pyramid", "mss-ova", "mss-ssvm"}));
  add_pyramid_flags(train, cfg, padding);
  train->add_option("--c", cfg.detector.train.c, "SVM trade-off C")->check(CLI::PositiveNumber);
  train->add_option("--seed", seed, "random seed");
  train->add_option("--virtual", cfg.detector.virtual_count, "virtual positive copies per image")
      ->check(CLI::NonNegativeNumber);
  train->add_option("--rounds", cfg.detector.train.mining_rounds, "mining rounds cap")->check(CLI::NonNegativeNumber);
  train->add_option("--init-negatives", cfg.detector.train.initial_negatives, "initial random negatives")
      ->check(CLI::NonNegativeNumber);
  train->add_option("--round-cap", cfg.detector.train.round_cap, "negatives added per round at most")
      ->check(CLI::NonNegativeNumber);
  train->add_option("--epochs", cfg.detector.train.ssvm_epochs, "structured SVM epochs")->check(CLI::PositiveNumber);
  train->add_option("--template", template_cells, "template size in cells, WxH (default: mean box)");
  train->add_option("--nms", cfg.detector.nms, "NMS overlap for train-set AP");
  train->add_flag("--preset-desk", desk, "desk-scale mining sizes (500 initial, 500 per round)");
  train->add_option("--out", cfg.out, "output directory")->required();

  auto* detect = app.add_subcommand("detect", "run a model on an image, a pyramid file or a dataset");
  detect->add_option("--model", cfg.model, "model file")->required();
  detect->add_option("--input", cfg.input, "PGM/PPM image or MSSFP pyramid");
  detect->add_option("--data", cfg.data, "dataset directory");
  detect->add_option("--subset", cfg.subset, "train, test or all")->check(CLI::IsMember({"train", "test", "all"}));
  detect->add_option("--threshold", cfg.threshold, "score threshold");
  detect->add_option("--nms", cfg.detector.nms, "NMS overlap threshold");
  detect->add_option("--out", cfg.out, "output file (default: standard output)");

  auto* eval = app.add_subcommand("eval", "precision-recall and AP of a detection file");
  eval->add_option("--detections", cfg.detections, "detection file")->required();
  eval->add_option("--annotations", cfg.annotations, "annotation file");
  eval->add_option("--data", cfg.data, "dataset directory (annotations and subset manifest)");
  eval->add_option("--subset", cfg.subset, "train, test or all")->check(CLI::IsMember({"train", "test", "all"}));
  eval->add_option("--overlap", cfg.overlap, "overlap requirement")->check(CLI::Range(0.0, 1.0));
  eval->add_flag("--continuous", cfg.continuous, "continuous instead of 11-point AP");
  eval->add_option("--out", cfg.out, "PR curve CSV");

  auto* analyze = app.add_subcommand("analyze", "weight report and template heatmaps");
  analyze->add_option("--model", cfg.model, "model file")->required();
  analyze->add_option("--out", cfg.out, "output directory")->required();

  auto* exportp = app.add_subcommand("export-pyramid", "write an image's HOG pyramid as MSSFP");
  exportp->add_option("--input", cfg.input, "image")->required();
  add_pyramid_flags(exportp, cfg, padding);
  exportp->add_option("--out", cfg.out, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.detector.kind = mss::parse_detector_kind(family);
    if (!padding.empty()) cfg.detector.padding = mss::parse_padding(padding);
    if (app.got_subcommand(synth) ? synth->count("--seed") : train->count("--seed")) cfg.seed = seed;
    if (desk) mss::apply_desk_preset(cfg);
    if (!template_cells.empty()) {
      const auto x = template_cells.find('x');
      if (x == std::string::npos) throw mss::Error("--template expects WxH");
      cfg.detector.template_dims = mss::TemplateDims{std::stoi(template_cells.substr(0, x)),
                                                     std::stoi(template_cells.substr(x + 1))};
    }
    if (*synth) return mss::cmd_synth(cfg, std::cout, std::cerr);
    if (*train) return mss::cmd_train(cfg, std::cout, std::cerr);
    if (*detect) return mss::cmd_detect(cfg, std::cout, std::cerr);
    if (*eval) return mss::cmd_eval(cfg, std::cout, std::cerr);
    if (*analyze) return mss::cmd_analyze(cfg, std::cout, std::cerr);
    if (*exportp) return mss::cmd_export_pyramid(cfg, std::cout, std::cerr);
  } catch (const mss::FingerprintMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
