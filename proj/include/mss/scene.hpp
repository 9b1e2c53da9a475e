#ifndef MSS_SCENE_HPP_
#define MSS_SCENE_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mss/geometry.hpp"
#include "mss/image.hpp"

namespace mss {

enum class ContextMode { Grounded, ContextFree };

struct ObjectPlacement {
  double cx = 0;
  double cy = 0;  // ignored in grounded mode, where the ground rule fixes it
  double scale = 1;
};

/// Description of one synthetic scene.
///
/// Objects are squares of side `object_size * scale` with a 2x2 checker
/// pattern. In grounded mode the scene has a sky, a dark horizon line at
/// `horizon * height` and perspective ground texture; each object rests on the
/// ground with its bottom edge `ground_ratio * side` pixels below the horizon,
/// so apparent size grows linearly with distance below the horizon. In
/// context-free mode objects sit wherever they are placed on i.i.d. noise.
///
/// Clutter items are unannotated checker decoys. Grounded decoys have the
/// wrong size for their position: alternately they straddle the horizon or
/// stand on the ground at a depth that calls for at least twice their size.
/// Context-free decoys go anywhere and are locally identical to objects.
struct SceneSpec {
  int width = 192;
  int height = 192;
  std::vector<ObjectPlacement> objects;
  ContextMode mode = ContextMode::Grounded;
  int clutter = 0;
  std::uint64_t seed = 0;
  double object_size = 32;
  double horizon = 0.2;
  double ground_ratio = 1.5;
  double clutter_scale_min = 1.0;
  double clutter_scale_max = 2.0;
};

struct Scene {
  Image image;
  std::vector<Box> boxes;
};

/// Renders a scene. Deterministic for a fixed spec. Throws if a placement
/// does not fit inside the canvas.
Scene generate_scene(const SceneSpec& spec);

/// Box an object placement will occupy (before the canvas check).
Box placement_box(const SceneSpec& spec, const ObjectPlacement& p);
/// Pixel row of the horizon line.
int horizon_row(const SceneSpec& spec);

/// Flat key=value text form. `object = cx cy scale` may repeat.
SceneSpec parse_scene_spec(std::string_view text);
std::string format_scene_spec(const SceneSpec& spec);

struct KeyValue {
  std::size_t line = 0;
  std::string key;
  std::string value;
};

/// Splits `key = value` lines; blank lines and '#' comments are skipped.
/// Throws ParseError (offset = 1-based line number) on a line without '='.
std::vector<KeyValue> parse_key_value_lines(std::string_view text);

/// Applies one scene key to `spec`. Returns false for keys it does not know.
bool apply_scene_key(SceneSpec& spec, const KeyValue& kv);

std::string to_string(ContextMode mode);
ContextMode parse_context_mode(std::string_view s);

}  // namespace mss

#endif  // MSS_SCENE_HPP_
