#include <benchmark/benchmark.h>

#include "tiltvtol/allocation.hpp"
#include "tiltvtol/controller.hpp"
#include "tiltvtol/plant.hpp"
#include "tiltvtol/reference.hpp"
#include "tiltvtol/sim.hpp"

using namespace tiltvtol;

namespace {

VehicleState cruising() {
  VehicleState s;
  s.velocity = Vec3(3.0, -1.0, 0.2);
  s.omega = Vec3(0.4, -0.2, 0.1);
  s.thrust_dir = UnitVec3::from_planar(Vec2(0.2, -0.1));
  return s;
}

void BM_PlantStep(benchmark::State& state) {
  const VehicleParams p;
  VehicleState s = cruising();
  PlantInput in;
  in.thrust = p.mass * p.gravity;
  in.torque = Vec3(1e-3, -2e-3, 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(s = step(cruising(), in, {}, p, 0.0, 1e-3));
  }
}
BENCHMARK(BM_PlantStep);

void BM_Allocate(benchmark::State& state) {
  const VehicleParams p;
  const UnitVec3 u = UnitVec3::from_planar(Vec2(0.2, -0.1));
  const Wrench w{16.0, Vec3(0.01, -0.02, 0.005)};
  for (auto _ : state) benchmark::DoNotOptimize(allocate(w, u, p));
}
BENCHMARK(BM_Allocate);

void BM_ControlStep(benchmark::State& state) {
  const VehicleParams p;
  const Gains g;
  const VehicleState s = cruising();
  const ReferenceSample ref = lissajous(1.0, 2.0 * 3.141592653589793 / 15.0, 5.0);
  const Rotation level;
  ControllerState cs;
  for (auto _ : state) {
    const PrimaryCommand pc = primary_position(s, ref, {}, p, g, cs, 1.0, 1e-3);
    const SecondaryCommand sc = secondary_attitude(s, level, g);
    const TiltCommand tc = tilt_and_omega(s, pc, sc, g, p);
    benchmark::DoNotOptimize(inner_torque(s, tc.omega, Vec3::Zero(), std::nullopt, p, g,
                                          InnerLoopMode::kReduced));
  }
}
BENCHMARK(BM_ControlStep);

void BM_FigureEight(benchmark::State& state) {
  ScenarioConfig c = figure_eight_slow();
  c.duration = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run(c).metrics);
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(c.duration / c.dt));
}
BENCHMARK(BM_FigureEight)->Arg(1)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
