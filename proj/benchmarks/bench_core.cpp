#include <benchmark/benchmark.h>

#include "conical/solver.hpp"

#include <random>

using namespace conical;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Bed {
  QuadMesh mesh;
  CellFrames frames;
  CaseSetup euler;
  CaseSetup mhd;
  Eigen::VectorXd Ue, Um;

  Bed(int W, int H) {
    mesh = generate_cone_mesh(circle_body(10.0 * kPi / 180.0), W, H);
    frames = build_cell_frames(mesh);
    FreeStream fs;
    fs.mach = 2.0;
    fs.aoa = 5.0 * kPi / 180.0;
    StencilBank bank = build_stencil_bank();
    euler = make_case_setup(frames, GasModel{}, fs, false, bank);
    FreeStream fm = fs;
    fm.b_cartesian = freestream_b_perp_up(fs, 0.3);
    mhd = make_case_setup(frames, GasModel{}, fm, true, bank);
    Ue = freestream_state_vector(euler);
    Um = freestream_state_vector(mhd);
    perturb(Ue, euler.nvars());
    perturb(Um, mhd.nvars());
  }

  static void perturb(Eigen::VectorXd& U, int nv) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> d(-0.05, 0.05);
    for (int i = 0; i < U.size(); ++i)
      U(i) += (i % nv == 0 || i % nv == 4) ? std::abs(d(rng)) : d(rng);
  }
};

Bed& bed() {
  static Bed b(40, 60);
  return b;
}

void BM_CovariantDerivative(benchmark::State& state) {
  const CellFrames& F = bed().frames;
  StencilBank bank = build_stencil_bank();
  CovariantOperator op = make_covariant_operator(bank.interior_d1, 1, 1, F);
  std::vector<Vec3> u(F.cells(), Vec3(0.3, -0.2, 0.8));
  for (auto _ : state) {
    Vec3 acc = Vec3::Zero();
    for (int i = 0; i < F.cells(); ++i)
      acc += covariant_derivative_rank1(op, i, u);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * bed().frames.cells());
}

void BM_EulerResidual(benchmark::State& state) {
  for (auto _ : state) {
    Eigen::VectorXd R = assemble_euler_residual(bed().euler, bed().Ue, 0.5);
    benchmark::DoNotOptimize(R);
  }
}

void BM_MhdResidual(benchmark::State& state) {
  for (auto _ : state) {
    Eigen::VectorXd R = assemble_mhd_residual(bed().mhd, bed().Um, 0.5);
    benchmark::DoNotOptimize(R);
  }
}

void BM_EulerJacobian(benchmark::State& state) {
  for (auto _ : state) {
    SpMat J = assemble_jacobian(bed().euler, bed().Ue);
    benchmark::DoNotOptimize(J);
  }
}

void BM_KktStep(benchmark::State& state) {
  static Bed small(16, 10);
  SpMat J = assemble_jacobian(small.mhd, small.Um);
  Eigen::VectorXd Res = assemble_mhd_residual(small.mhd, small.Um, 0.5);
  SpMat C;
  Eigen::VectorXd Z;
  constraint_rows(small.mhd, 0.5, C, Z);
  Eigen::VectorXd b = J * small.Um - Res;
  for (auto _ : state) {
    Eigen::VectorXd U = solve_kkt(J, b, C, Z);
    benchmark::DoNotOptimize(U);
  }
}

}  // namespace

BENCHMARK(BM_CovariantDerivative);
BENCHMARK(BM_EulerResidual);
BENCHMARK(BM_MhdResidual);
BENCHMARK(BM_EulerJacobian);
BENCHMARK(BM_KktStep);

BENCHMARK_MAIN();
