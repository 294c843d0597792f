// Microbenchmarks for the hot paths: reaction potentials, the phase-plane
// integration behind the speed solver, and single time steps of the two PDE
// schemes.  Run with --benchmark_filter=... to focus on one.

#include <benchmark/benchmark.h>

#include "fkpp/pde.hpp"
#include "fkpp/reaction.hpp"
#include "fkpp/wave_system.hpp"

namespace {

const fkpp::ReactionSpec& cubic_spec() {
  static const auto spec = fkpp::ReactionSpec::cubic(0.75);
  return spec;
}

const fkpp::ReactionSpec& holder_spec() {
  static const auto spec = fkpp::ReactionSpec::holder(0.75, 0.5, 0.5);
  return spec;
}

void BM_eval_F_cubic(benchmark::State& state) {
  double r = 0.0;
  for (auto _ : state) {
    r += 1e-6;
    if (r > 1.0) r = 1e-6;
    benchmark::DoNotOptimize(fkpp::eval_F(cubic_spec(), r));
  }
}
BENCHMARK(BM_eval_F_cubic);

void BM_eval_F_holder(benchmark::State& state) {
  double r = 0.0;
  for (auto _ : state) {
    r += 0.05;
    if (r > 1.0) r = 0.05;
    benchmark::DoNotOptimize(fkpp::eval_F(holder_spec(), r));
  }
}
BENCHMARK(BM_eval_F_holder);

void BM_integrate_y_cubic(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(fkpp::integrate_y(cubic_spec(), 0.25));
  }
}
BENCHMARK(BM_integrate_y_cubic);

void BM_solve_speed_cubic(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(fkpp::solve_speed(cubic_spec()));
  }
}
BENCHMARK(BM_solve_speed_cubic);

fkpp::State step_setup(const fkpp::Domain& dom) {
  fkpp::InitialData init;
  init.kind = fkpp::InitialData::Kind::smoothed_step;
  init.at = 0.0;
  init.width = 1.0;
  return {0.0, init.resolve(dom, nullptr)};
}

void BM_step_imex(benchmark::State& state) {
  fkpp::Domain dom;
  dom.n_cells = static_cast<int>(state.range(0));
  fkpp::SchemeCtrl ctrl;
  ctrl.kind = fkpp::SchemeCtrl::Kind::imex_fd;
  fkpp::ImexStepper stepper(cubic_spec(), 0.35, dom, ctrl);
  auto st = step_setup(dom);
  for (auto _ : state) {
    stepper.step(st);
    benchmark::DoNotOptimize(st.v.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_step_imex)->Arg(2000)->Arg(8000);

void BM_step_splitting(benchmark::State& state) {
  fkpp::Domain dom;
  dom.n_cells = static_cast<int>(state.range(0));
  fkpp::SchemeCtrl ctrl;
  ctrl.kind = fkpp::SchemeCtrl::Kind::splitting_green;
  fkpp::SplittingStepper stepper(cubic_spec(), 0.35, dom, ctrl);
  auto st = step_setup(dom);
  for (auto _ : state) {
    stepper.step(st);
    benchmark::DoNotOptimize(st.v.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_step_splitting)->Arg(2000)->Arg(8000);

}  // namespace

BENCHMARK_MAIN();
