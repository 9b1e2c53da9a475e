#ifndef MSS_COMMANDS_HPP_
#define MSS_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "mss/pipeline.hpp"

namespace mss {

/// Everything a subcommand may need. Each subcommand reads its own subset.
struct RunConfig {
  std::filesystem::path data;         // dataset directory
  std::filesystem::path spec;         // synth spec file
  std::filesystem::path model;        // model file
  std::filesystem::path input;        // image or MSSFP file
  std::filesystem::path detections;   // detection text file
  std::filesystem::path annotations;  // annotation file
  std::filesystem::path out;
  std::string subset = "test";
  int count = 100;
  std::optional<std::uint64_t> seed;
  DetectorConfig detector;
  double threshold = 0.0;
  double overlap = 0.5;
  bool continuous = false;
};

/// Desk-scale defaults: 500 initial negatives and at most 500 per round.
void apply_desk_preset(RunConfig& config);

// Each returns the process exit code; normal output goes to `out`,
// diagnostics to `err`. Library errors propagate as exceptions.
int cmd_synth(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_detect(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_eval(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_export_pyramid(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace mss

#endif  // MSS_COMMANDS_HPP_
