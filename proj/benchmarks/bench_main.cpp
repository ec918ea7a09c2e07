#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <vector>

#include "durx/assembly.hpp"
#include "durx/cholesky.hpp"
#include "durx/crack.hpp"
#include "durx/enrichment.hpp"
#include "durx/mesh.hpp"

namespace {

// Edge-cracked plate under top traction, bottom edge pinned, sized by
// the element count along the long side.
struct Plate {
  durx::QuadMesh mesh;
  durx::Physics phys;
  durx::CrackPath crack;
  durx::Classification cls;
  durx::DofMap map = durx::DofMap::create(0);
  std::unique_ptr<durx::Assembler> as;
  durx::SparseSpd K;
  std::vector<double> F;
};

Plate& plate(int nx) {
  static std::map<int, std::unique_ptr<Plate>> cache;
  auto it = cache.find(nx);
  if (it != cache.end()) return *it->second;

  auto p = std::make_unique<Plate>();
  int ny = nx / 4;
  p->mesh = durx::build_mesh(200.0, 50.0, nx, ny);
  p->phys.base = {7.17e4, 0.33};

  double ymid = (ny / 2 + 0.5) * p->mesh.dy;
  double xtip = (nx / 8 + 0.6) * p->mesh.dx;
  p->crack.pts = {{0.0, ymid}, {xtip, ymid}};

  p->cls = durx::classify_elements(p->mesh, p->crack);
  p->map = durx::DofMap::create(static_cast<int>(p->mesh.nodes.size()));
  durx::update_dof_map(p->map, p->mesh, p->cls, p->crack);
  p->as = std::make_unique<durx::Assembler>(p->mesh, p->phys);
  p->K = p->as->assemble(p->map, p->cls, p->crack);

  p->F.assign(static_cast<std::size_t>(p->map.total), 0.0);
  durx::add_edge_traction(p->mesh, 't', {0.0, 50.0}, p->cls, p->map, p->F);
  for (int i = 0; i <= nx; ++i) {
    int n = p->mesh.node_id(i, 0);
    p->K.mask_dof(p->map.std_dof(n, 0));
    p->K.mask_dof(p->map.std_dof(n, 1));
    p->F[static_cast<std::size_t>(p->map.std_dof(n, 0))] = 0.0;
    p->F[static_cast<std::size_t>(p->map.std_dof(n, 1))] = 0.0;
  }

  Plate& ref = *p;
  cache.emplace(nx, std::move(p));
  return ref;
}

void BM_Classify(benchmark::State& state) {
  Plate& p = plate(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    durx::Classification c = durx::classify_elements(p.mesh, p.crack);
    benchmark::DoNotOptimize(c.split_elems.data());
  }
  state.counters["dofs"] = p.map.total;
}

void BM_AssembleGlobal(benchmark::State& state) {
  Plate& p = plate(static_cast<int>(state.range(0)));
  durx::Assembler as(p.mesh, p.phys);
  for (auto _ : state) {
    durx::SparseSpd K = as.assemble(p.map, p.cls, p.crack);
    benchmark::DoNotOptimize(K.size());
  }
  state.counters["dofs"] = p.map.total;
}

void BM_FactorFull(benchmark::State& state) {
  Plate& p = plate(static_cast<int>(state.range(0)));
  durx::EnvelopeCholesky L;
  for (auto _ : state) {
    L.refactor(p.K, 0);
    benchmark::DoNotOptimize(L.size());
  }
  state.counters["dofs"] = p.map.total;
}

void BM_TriangularSolve(benchmark::State& state) {
  Plate& p = plate(static_cast<int>(state.range(0)));
  durx::EnvelopeCholesky L;
  L.factor(p.K);
  std::vector<double> x;
  for (auto _ : state) {
    x = p.F;
    L.solve(x);
    benchmark::DoNotOptimize(x.data());
  }
  state.counters["dofs"] = p.map.total;
}

void BM_BranchFunctions(benchmark::State& state) {
  durx::CrackTip tip;
  tip.pos = {3.0, 4.0};
  tip.angle = 0.3;
  durx::Vec2 q{3.7, 4.4};
  for (auto _ : state) {
    durx::BranchEval be = durx::branch_functions(tip, q);
    benchmark::DoNotOptimize(be.f[0]);
  }
}

}  // namespace

BENCHMARK(BM_Classify)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleGlobal)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FactorFull)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TriangularSolve)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BranchFunctions);

BENCHMARK_MAIN();
