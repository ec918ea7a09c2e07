#include "durx/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace durx {

namespace {

struct Line {
  int no = 0;
  std::string section;
  std::string key;
  std::string value;
};

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw std::invalid_argument(origin + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const Line& ln, const std::string& origin, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    fail(origin, ln.no, "expected a number for '" + ln.key + "', got '" + text + "'");
  }
  if (used != text.size())
    fail(origin, ln.no, "trailing junk in number for '" + ln.key + "': '" + text + "'");
  return v;
}

double parse_double(const Line& ln, const std::string& origin) {
  return parse_double(ln, origin, ln.value);
}

int parse_int(const Line& ln, const std::string& origin) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(ln.value, &used);
  } catch (const std::exception&) {
    fail(origin, ln.no, "expected an integer for '" + ln.key + "'");
  }
  if (used != ln.value.size())
    fail(origin, ln.no, "trailing junk in integer for '" + ln.key + "'");
  return static_cast<int>(v);
}

Vec2 parse_vec2(const Line& ln, const std::string& origin, const std::string& text) {
  std::istringstream is(text);
  std::string a, b, rest;
  if (!(is >> a >> b) || (is >> rest))
    fail(origin, ln.no, "'" + ln.key + "' needs exactly two numbers");
  return {parse_double(ln, origin, a), parse_double(ln, origin, b)};
}

Vec2 parse_vec2(const Line& ln, const std::string& origin) {
  return parse_vec2(ln, origin, ln.value);
}

std::vector<Vec2> parse_points(const Line& ln, const std::string& origin) {
  std::vector<Vec2> pts;
  std::string text = ln.value;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string piece = trim(comma == std::string::npos ? text.substr(start)
                                                        : text.substr(start, comma - start));
    if (piece.empty()) fail(origin, ln.no, "empty vertex in '" + ln.key + "'");
    pts.push_back(parse_vec2(ln, origin, piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return pts;
}

char parse_edge(const Line& ln, const std::string& origin, const std::string& word) {
  if (word == "bottom") return 'b';
  if (word == "top") return 't';
  if (word == "left") return 'l';
  if (word == "right") return 'r';
  fail(origin, ln.no, "unknown edge '" + word + "' (want bottom/top/left/right)");
}

std::string edge_name(char e) {
  switch (e) {
    case 'b': return "bottom";
    case 't': return "top";
    case 'l': return "left";
    default: return "right";
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunConfig parse_scenario_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int no = 0;
  std::string section;
  int section_line = 0;

  // Repeatable sections accumulate into these until the section closes.
  Hole hole;
  Inclusion inc;
  PointLoad pl;
  EdgeLoad el;
  std::vector<std::string> seen;  // keys of the open repeatable section

  auto close_section = [&](int line) {
    auto need = [&](const char* k) {
      for (const auto& s : seen)
        if (s == k) return;
      fail(origin, line, "section [" + section + "] is missing key '" + std::string(k) + "'");
    };
    if (section == "hole") {
      need("center");
      need("radius");
      cfg.holes.push_back(hole);
    } else if (section == "inclusion") {
      need("center");
      need("radius");
      need("e");
      need("nu");
      cfg.inclusions.push_back(inc);
    } else if (section == "load.point") {
      need("pos");
      need("force");
      cfg.point_loads.push_back(pl);
    } else if (section == "load.edge") {
      need("edge");
      need("traction");
      cfg.edge_loads.push_back(el);
    }
    seen.clear();
    hole = Hole{};
    inc = Inclusion{};
    pl = PointLoad{};
    el = EdgeLoad{};
  };

  while (std::getline(in, raw)) {
    ++no;
    std::string line = raw;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, no, "unterminated section header");
      close_section(section_line);
      section = trim(line.substr(1, line.size() - 2));
      section_line = no;
      static const char* known[] = {"scenario", "domain",     "mesh",      "material",
                                    "hole",     "inclusion",  "crack",     "load.point",
                                    "load.edge", "bc",        "growth",    "solver",
                                    "output"};
      bool ok = false;
      for (const char* k : known)
        if (section == k) ok = true;
      if (!ok) fail(origin, no, "unknown section [" + section + "]");
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(origin, no, "expected 'key = value'");
    Line ln{no, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
    if (ln.key.empty()) fail(origin, no, "empty key");
    if (ln.value.empty()) fail(origin, no, "empty value for '" + ln.key + "'");
    if (section.empty()) fail(origin, no, "key '" + ln.key + "' outside any section");
    seen.push_back(ln.key);

    auto unknown = [&]() {
      fail(origin, no, "unknown key '" + ln.key + "' in [" + section + "]");
    };

    if (section == "scenario") {
      if (ln.key == "name")
        cfg.name = ln.value;
      else
        unknown();
    } else if (section == "domain") {
      if (ln.key == "width")
        cfg.width = parse_double(ln, origin);
      else if (ln.key == "height")
        cfg.height = parse_double(ln, origin);
      else
        unknown();
    } else if (section == "mesh") {
      if (ln.key == "nx")
        cfg.nx = parse_int(ln, origin);
      else if (ln.key == "ny")
        cfg.ny = parse_int(ln, origin);
      else
        unknown();
    } else if (section == "material") {
      if (ln.key == "e")
        cfg.material.e = parse_double(ln, origin);
      else if (ln.key == "nu")
        cfg.material.nu = parse_double(ln, origin);
      else
        unknown();
    } else if (section == "hole") {
      if (ln.key == "center")
        hole.center = parse_vec2(ln, origin);
      else if (ln.key == "radius")
        hole.radius = parse_double(ln, origin);
      else
        unknown();
    } else if (section == "inclusion") {
      if (ln.key == "center")
        inc.center = parse_vec2(ln, origin);
      else if (ln.key == "radius")
        inc.radius = parse_double(ln, origin);
      else if (ln.key == "e")
        inc.mat.e = parse_double(ln, origin);
      else if (ln.key == "nu")
        inc.mat.nu = parse_double(ln, origin);
      else
        unknown();
    } else if (section == "crack") {
      if (ln.key == "points")
        cfg.crack_points = parse_points(ln, origin);
      else if (ln.key == "tips") {
        if (ln.value == "back") {
          cfg.tip_front = false;
          cfg.tip_back = true;
        } else if (ln.value == "front") {
          cfg.tip_front = true;
          cfg.tip_back = false;
        } else if (ln.value == "both") {
          cfg.tip_front = true;
          cfg.tip_back = true;
        } else {
          fail(origin, no, "tips must be back, front or both");
        }
      } else
        unknown();
    } else if (section == "load.point") {
      if (ln.key == "pos")
        pl.pos = parse_vec2(ln, origin);
      else if (ln.key == "force")
        pl.force = parse_vec2(ln, origin);
      else
        unknown();
    } else if (section == "load.edge") {
      if (ln.key == "edge")
        el.edge = parse_edge(ln, origin, ln.value);
      else if (ln.key == "traction")
        el.traction = parse_vec2(ln, origin);
      else
        unknown();
    } else if (section == "bc") {
      if (ln.key == "fix") {
        std::istringstream is(ln.value);
        std::string w;
        while (is >> w) {
          char e = parse_edge(ln, origin, w);
          if (cfg.fixed_edges.find(e) != std::string::npos)
            fail(origin, no, "edge '" + w + "' fixed twice");
          cfg.fixed_edges.push_back(e);
        }
      } else
        unknown();
    } else if (section == "growth") {
      if (ln.key == "da")
        cfg.da = parse_double(ln, origin);
      else if (ln.key == "max_steps")
        cfg.max_steps = parse_int(ln, origin);
      else
        unknown();
    } else if (section == "solver") {
      if (ln.key == "mode") {
        if (ln.value != "full" && ln.value != "dur" && ln.value != "both")
          fail(origin, no, "mode must be full, dur or both");
        cfg.mode = ln.value;
      } else if (ln.key == "eta")
        cfg.eta = parse_double(ln, origin);
      else
        unknown();
    } else if (section == "output") {
      if (ln.key == "dir")
        cfg.out_dir = ln.value;
      else
        unknown();
    }
  }
  close_section(section_line);
  return cfg;
}

RunConfig parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_scenario_text(ss.str(), path);
  validate_config(cfg);
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  auto bad = [](const std::string& msg) { throw std::invalid_argument("scenario: " + msg); };
  if (!(cfg.width > 0.0) || !(cfg.height > 0.0)) bad("domain width/height must be positive");
  if (cfg.nx < 2 || cfg.ny < 2) bad("mesh nx/ny must be at least 2");
  auto check_mat = [&](const Material& m, const std::string& who) {
    if (!(m.e > 0.0)) bad(who + " e must be positive");
    if (!(m.nu >= 0.0) || !(m.nu < 0.5)) bad(who + " nu must lie in [0, 0.5)");
  };
  check_mat(cfg.material, "material");
  auto inside = [&](Vec2 c, double r) {
    return c[0] - r > 0.0 && c[0] + r < cfg.width && c[1] - r > 0.0 && c[1] + r < cfg.height;
  };
  for (const auto& h : cfg.holes) {
    if (!(h.radius > 0.0)) bad("hole radius must be positive");
    if (!inside(h.center, h.radius)) bad("hole extends outside the domain");
  }
  for (const auto& i : cfg.inclusions) {
    if (!(i.radius > 0.0)) bad("inclusion radius must be positive");
    if (!inside(i.center, i.radius)) bad("inclusion extends outside the domain");
    check_mat(i.mat, "inclusion");
  }
  if (cfg.crack_points.size() < 2) bad("crack needs at least two points");
  for (const auto& p : cfg.crack_points)
    if (p[0] < 0.0 || p[0] > cfg.width || p[1] < 0.0 || p[1] > cfg.height)
      bad("crack vertex outside the domain");
  for (std::size_t k = 1; k < cfg.crack_points.size(); ++k) {
    const auto &a = cfg.crack_points[k - 1], &b = cfg.crack_points[k];
    if (a[0] == b[0] && a[1] == b[1]) bad("repeated crack vertex");
  }
  if (!cfg.tip_front && !cfg.tip_back) bad("crack needs at least one growing tip");
  if (cfg.point_loads.empty() && cfg.edge_loads.empty()) bad("no load given");
  for (const auto& l : cfg.point_loads)
    if (l.pos[0] < 0.0 || l.pos[0] > cfg.width || l.pos[1] < 0.0 || l.pos[1] > cfg.height)
      bad("point load outside the domain");
  if (cfg.fixed_edges.empty()) bad("at least one fixed edge is required");
  const double dx = cfg.width / cfg.nx, dy = cfg.height / cfg.ny;
  const double diag = std::hypot(dx, dy);
  if (!(cfg.da > diag))
    bad("growth increment da must exceed the element diagonal (" + fmt(diag) +
        ") so a growing tip always leaves its element");
  if (cfg.max_steps < 1) bad("max_steps must be at least 1");
  if (!(cfg.eta > 0.0) || cfg.eta > 100.0) bad("eta must lie in (0, 100]");
}

std::string serialize_scenario(const RunConfig& cfg) {
  std::ostringstream o;
  o << "[scenario]\n";
  if (!cfg.name.empty()) o << "name = " << cfg.name << "\n";
  o << "\n[domain]\nwidth = " << fmt(cfg.width) << "\nheight = " << fmt(cfg.height) << "\n";
  o << "\n[mesh]\nnx = " << cfg.nx << "\nny = " << cfg.ny << "\n";
  o << "\n[material]\ne = " << fmt(cfg.material.e) << "\nnu = " << fmt(cfg.material.nu) << "\n";
  for (const auto& h : cfg.holes)
    o << "\n[hole]\ncenter = " << fmt(h.center[0]) << " " << fmt(h.center[1])
      << "\nradius = " << fmt(h.radius) << "\n";
  for (const auto& i : cfg.inclusions)
    o << "\n[inclusion]\ncenter = " << fmt(i.center[0]) << " " << fmt(i.center[1])
      << "\nradius = " << fmt(i.radius) << "\ne = " << fmt(i.mat.e)
      << "\nnu = " << fmt(i.mat.nu) << "\n";
  o << "\n[crack]\npoints = ";
  for (std::size_t k = 0; k < cfg.crack_points.size(); ++k) {
    if (k) o << ", ";
    o << fmt(cfg.crack_points[k][0]) << " " << fmt(cfg.crack_points[k][1]);
  }
  o << "\ntips = "
    << (cfg.tip_front && cfg.tip_back ? "both" : (cfg.tip_front ? "front" : "back")) << "\n";
  for (const auto& l : cfg.point_loads)
    o << "\n[load.point]\npos = " << fmt(l.pos[0]) << " " << fmt(l.pos[1])
      << "\nforce = " << fmt(l.force[0]) << " " << fmt(l.force[1]) << "\n";
  for (const auto& l : cfg.edge_loads)
    o << "\n[load.edge]\nedge = " << edge_name(l.edge) << "\ntraction = " << fmt(l.traction[0])
      << " " << fmt(l.traction[1]) << "\n";
  o << "\n[bc]\nfix =";
  for (char e : cfg.fixed_edges) o << " " << edge_name(e);
  o << "\n";
  o << "\n[growth]\nda = " << fmt(cfg.da) << "\nmax_steps = " << cfg.max_steps << "\n";
  o << "\n[solver]\nmode = " << cfg.mode << "\neta = " << fmt(cfg.eta) << "\n";
  o << "\n[output]\ndir = " << cfg.out_dir << "\n";
  return o.str();
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  auto veq = [](Vec2 x, Vec2 y) { return x[0] == y[0] && x[1] == y[1]; };
  if (a.name != b.name || a.width != b.width || a.height != b.height || a.nx != b.nx ||
      a.ny != b.ny || a.material.e != b.material.e || a.material.nu != b.material.nu ||
      a.holes.size() != b.holes.size() || a.inclusions.size() != b.inclusions.size() ||
      a.crack_points.size() != b.crack_points.size() || a.tip_front != b.tip_front ||
      a.tip_back != b.tip_back || a.point_loads.size() != b.point_loads.size() ||
      a.edge_loads.size() != b.edge_loads.size() || a.fixed_edges != b.fixed_edges ||
      a.da != b.da || a.max_steps != b.max_steps || a.mode != b.mode || a.eta != b.eta ||
      a.out_dir != b.out_dir)
    return false;
  for (std::size_t k = 0; k < a.holes.size(); ++k)
    if (!veq(a.holes[k].center, b.holes[k].center) || a.holes[k].radius != b.holes[k].radius)
      return false;
  for (std::size_t k = 0; k < a.inclusions.size(); ++k) {
    const auto &x = a.inclusions[k], &y = b.inclusions[k];
    if (!veq(x.center, y.center) || x.radius != y.radius || x.mat.e != y.mat.e ||
        x.mat.nu != y.mat.nu)
      return false;
  }
  for (std::size_t k = 0; k < a.crack_points.size(); ++k)
    if (!veq(a.crack_points[k], b.crack_points[k])) return false;
  for (std::size_t k = 0; k < a.point_loads.size(); ++k)
    if (!veq(a.point_loads[k].pos, b.point_loads[k].pos) ||
        !veq(a.point_loads[k].force, b.point_loads[k].force))
      return false;
  for (std::size_t k = 0; k < a.edge_loads.size(); ++k)
    if (a.edge_loads[k].edge != b.edge_loads[k].edge ||
        !veq(a.edge_loads[k].traction, b.edge_loads[k].traction))
      return false;
  return true;
}

}  // namespace durx
