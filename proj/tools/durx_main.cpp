#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "durx/io.hpp"
#include "durx/scenario.hpp"
#include "durx/sim.hpp"

namespace {

std::vector<int> parse_dof_list(const std::string& text) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string piece =
        comma == std::string::npos ? text.substr(start) : text.substr(start, comma - start);
    if (!piece.empty()) out.push_back(std::stoi(piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("--dofs needs at least one target");
  return out;
}

int cmd_run(const std::string& config, const std::string& mode, const std::string& out_dir) {
  durx::RunConfig cfg = durx::parse_scenario(config);
  if (!mode.empty()) cfg.mode = mode;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  std::printf("scenario %s: %dx%d mesh, mode %s, up to %d steps\n", cfg.name.c_str(),
              cfg.nx, cfg.ny, cfg.mode.c_str(), cfg.max_steps);
  durx::RunResult r = durx::run(cfg, true);
  for (const auto& s : r.steps) {
    std::printf("step %3d  dofs %6d  changed %5d  eta %5.2f%%", s.step, s.n_total,
                s.n_changed, s.eta);
    if (s.t_solve_dur > 0.0) std::printf("  dur %.3fs", s.t_solve_dur);
    if (s.t_solve_full > 0.0) std::printf("  full %.3fs", s.t_solve_full);
    if (s.e_u >= 0.0) std::printf("  E_u %.3e%%  E_s %.3e%%", s.e_u, s.e_sigma);
    std::printf("\n");
  }
  std::printf("wrote %s/{path,errors,timing}.csv and step_<k>.vtk\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_bench(const std::string& config, const std::string& dofs,
              const std::string& out_dir) {
  durx::RunConfig cfg = durx::parse_scenario(config);
  std::vector<int> targets = parse_dof_list(dofs);
  std::vector<durx::ScalePoint> rows = durx::benchmark_scaling(cfg, targets);

  durx::CsvTable csv({"phase", "dofs", "seconds"});
  auto phase = [&](const char* name, double durx::ScalePoint::* field) {
    for (const auto& r : rows)
      csv.add_row({name, durx::CsvTable::num(r.dofs), durx::CsvTable::num(r.*field)});
  };
  phase("solve_full", &durx::ScalePoint::solve_full_s);
  phase("solve_dur", &durx::ScalePoint::solve_dur_s);
  phase("update_global", &durx::ScalePoint::update_global_s);
  phase("update_local", &durx::ScalePoint::update_local_s);
  std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
  durx::ensure_dir(dir);
  csv.write(dir + "/scaling.csv");

  for (const auto& r : rows)
    std::printf("dofs %6d  solve full %.4fs  dur %.4fs  update global %.4fs  local %.4fs\n",
                r.dofs, r.solve_full_s, r.solve_dur_s, r.update_global_s, r.update_local_s);
  std::printf("wrote %s/scaling.csv\n", dir.c_str());
  return 0;
}

int cmd_validate(const std::string& config) {
  durx::RunConfig cfg = durx::parse_scenario(config);
  std::printf("%s: valid (%dx%d mesh, %zu hole(s), %zu inclusion(s), %d steps)\n",
              cfg.name.empty() ? config.c_str() : cfg.name.c_str(), cfg.nx, cfg.ny,
              cfg.holes.size(), cfg.inclusions.size(), cfg.max_steps);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D crack growth with a factorization-reusing reanalysis solver"};
  app.require_subcommand(1);

  std::string config, mode, out_dir, dofs = "2000,8000,20000";

  CLI::App* c_run = app.add_subcommand("run", "propagate a crack and write result tables");
  c_run->add_option("--config", config, "scenario file")->required()->check(CLI::ExistingFile);
  c_run->add_option("--mode", mode, "full, dur or both (overrides the file)")
      ->check(CLI::IsMember({"full", "dur", "both"}));
  c_run->add_option("--out", out_dir, "output directory (overrides the file)");

  CLI::App* c_bench = app.add_subcommand("bench", "time solver phases across problem sizes");
  c_bench->add_option("--config", config, "scenario file")->required()->check(CLI::ExistingFile);
  c_bench->add_option("--dofs", dofs, "comma-separated dof targets");
  c_bench->add_option("--out", out_dir, "output directory");

  CLI::App* c_val = app.add_subcommand("validate", "check a scenario file and exit");
  c_val->add_option("--config", config, "scenario file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_run->parsed()) return cmd_run(config, mode, out_dir);
    if (c_bench->parsed()) return cmd_bench(config, dofs, out_dir);
    return cmd_validate(config);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
