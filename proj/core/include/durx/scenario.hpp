#pragma once

#include <string>
#include <vector>

#include "durx/assembly.hpp"
#include "durx/crack.hpp"

namespace durx {

struct PointLoad {
  Vec2 pos{0.0, 0.0};
  Vec2 force{0.0, 0.0};  // N
};

struct EdgeLoad {
  char edge = 't';  // b, t, l, r
  Vec2 traction{0.0, 0.0};  // N/mm
};

struct RunConfig {
  std::string name;
  double width = 0.0, height = 0.0;  // mm
  int nx = 0, ny = 0;
  Material material;
  std::vector<Hole> holes;
  std::vector<Inclusion> inclusions;
  std::vector<Vec2> crack_points;
  bool tip_front = false;
  bool tip_back = true;
  std::vector<PointLoad> point_loads;
  std::vector<EdgeLoad> edge_loads;
  std::string fixed_edges;  // subset of "btlr", both components pinned
  double da = 0.0;          // growth increment, mm
  int max_steps = 1;
  std::string mode = "dur";  // full | dur | both
  double eta = 5.0;          // rebase threshold, percent
  std::string out_dir = "out";
};

bool operator==(const RunConfig& a, const RunConfig& b);

// Strict INI-style parser: [section] headers, key = value lines, '#'
// comments.  Unknown sections or keys and malformed values fail with
// the file name and line number.  parse_scenario also validates.
RunConfig parse_scenario(const std::string& path);
RunConfig parse_scenario_text(const std::string& text, const std::string& origin);

// Inverse of the parser: parse(serialize(c)) == c exactly.
std::string serialize_scenario(const RunConfig& cfg);

// Geometry, material and range checks; throws std::invalid_argument
// naming the offending field.
void validate_config(const RunConfig& cfg);

}  // namespace durx
