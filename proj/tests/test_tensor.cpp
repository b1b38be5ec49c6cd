#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "conical/tensor.hpp"

#include <cmath>
#include <random>

using namespace conical;

namespace {
constexpr double kPi = 3.14159265358979323846;

CellFrames cone_frames(int W, int H) {
  QuadMesh m = generate_cone_mesh(circle_body(10.0 * kPi / 180.0), W, H);
  return build_cell_frames(m);
}

std::vector<double> reconstruct(const DifferencePairs& d, int lo, int hi) {
  std::vector<double> c(hi - lo + 1, 0.0);
  for (const auto& p : d.pairs) {
    c[p.plus - lo] += p.weight;
    c[p.minus - lo] -= p.weight;
  }
  return c;
}
}  // namespace

TEST_CASE("stencil validation") {
  CHECK_THROWS_AS(validate_stencil(Stencil{}), TensorError);
  CHECK_THROWS_AS(make_stencil({{0, 1.0}, {1, -1.0 + 1e-10}}), TensorError);
  Stencil ok = make_stencil({{0, 1.0}, {1, -1.0}});
  CHECK(stencil_coefficient_sum(ok) == 0.0);
}

TEST_CASE("decomposition: symmetric five point") {
  Stencil s = make_stencil(
      {{-2, 1.0 / 12}, {-1, -2.0 / 3}, {1, 2.0 / 3}, {2, -1.0 / 12}});
  DifferencePairs d = decompose_to_differences(s);
  REQUIRE(d.pairs.size() == 2);
  CHECK(d.pairs[0].weight == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(d.pairs[0].plus == 1);
  CHECK(d.pairs[0].minus == -1);
  CHECK(d.pairs[1].weight == doctest::Approx(-1.0 / 12).epsilon(1e-15));
  CHECK(d.pairs[1].plus == 2);
  CHECK(d.pairs[1].minus == -2);
}

TEST_CASE("decomposition: leftover chain") {
  // (1, -3, 2) at offsets (-1, 0, 1): no mirrored opposites, chain pairing
  Stencil s = make_stencil({{-1, 1.0}, {0, -3.0}, {1, 2.0}});
  DifferencePairs d = decompose_to_differences(s);
  REQUIRE(d.pairs.size() == 2);
  CHECK(d.pairs[0].weight == -3.0);
  CHECK(d.pairs[0].plus == 0);
  CHECK(d.pairs[0].minus == -1);
  CHECK(d.pairs[1].weight == 2.0);
  CHECK(d.pairs[1].plus == 1);
  CHECK(d.pairs[1].minus == -1);
}

TEST_CASE("decomposition: dissipation stencils") {
  double C = 0.5;
  DifferencePairs visc =
      decompose_to_differences(make_stencil({{-1, -C}, {0, 2 * C}, {1, -C}}));
  REQUIRE(visc.pairs.size() == 2);
  CHECK(visc.pairs[0].weight == 2 * C);
  CHECK(visc.pairs[0].plus == 0);
  CHECK(visc.pairs[0].minus == -1);
  CHECK(visc.pairs[1].weight == -C);
  CHECK(visc.pairs[1].plus == 1);
  CHECK(visc.pairs[1].minus == -1);

  DifferencePairs bvisc = decompose_to_differences(make_stencil({{0, C}, {1, -C}}));
  REQUIRE(bvisc.pairs.size() == 1);
  CHECK(bvisc.pairs[0].weight == -C);
  CHECK(bvisc.pairs[0].plus == 1);
  CHECK(bvisc.pairs[0].minus == 0);
}

TEST_CASE("decomposition: one-sided rows") {
  DifferencePairs top = decompose_to_differences(
      make_stencil({{-2, 1.0 / 6}, {-1, -1.0}, {0, 0.5}, {1, 1.0 / 3}}));
  REQUIRE(top.pairs.size() == 3);
  CHECK(top.pairs[0].weight == -1.0);
  CHECK(top.pairs[0].plus == -1);
  CHECK(top.pairs[0].minus == -2);
  CHECK(top.pairs[1].weight == 0.5);
  CHECK(top.pairs[1].plus == 0);
  CHECK(top.pairs[1].minus == -2);
  CHECK(top.pairs[2].weight == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(top.pairs[2].plus == 1);
  CHECK(top.pairs[2].minus == -2);

  DifferencePairs bot = decompose_to_differences(
      make_stencil({{0, -1.5}, {1, 2.0}, {2, -0.5}}));
  REQUIRE(bot.pairs.size() == 2);
  CHECK(bot.pairs[0].weight == 2.0);
  CHECK(bot.pairs[0].plus == 1);
  CHECK(bot.pairs[0].minus == 0);
  CHECK(bot.pairs[1].weight == -0.5);
  CHECK(bot.pairs[1].plus == 2);
  CHECK(bot.pairs[1].minus == 0);

  DifferencePairs nb = decompose_to_differences(make_stencil(
      {{-1, -1.0 / 3}, {0, -0.5}, {1, 1.0}, {2, -1.0 / 6}}));
  REQUIRE(nb.pairs.size() == 3);
  CHECK(nb.pairs[0].weight == -0.5);
  CHECK(nb.pairs[0].minus == -1);
  CHECK(nb.pairs[1].weight == 1.0);
  CHECK(nb.pairs[2].weight == doctest::Approx(-1.0 / 6).epsilon(1e-15));
}

TEST_CASE("decomposition reconstructs random stencils") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int n = 0; n < 300; ++n) {
    int width = 2 + static_cast<int>(rng() % 4);
    Stencil s;
    double sum = 0.0;
    for (int k = 0; k < width; ++k) {
      double c = U(rng);
      s.entries.push_back({k - width / 2, c});
      sum += c;
    }
    s.entries.back().coeff -= sum;
    validate_stencil(s);
    DifferencePairs d = decompose_to_differences(s);
    auto rec = reconstruct(d, -3, 3);
    for (const auto& e : s.entries) {
      CHECK(rec[e.offset + 3] == doctest::Approx(e.coeff).epsilon(1e-13));
      rec[e.offset + 3] = 0.0;
    }
    for (double v : rec) CHECK(std::abs(v) < 1e-13);
  }
}

TEST_CASE("tensor slot application") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Mat3 M;
  for (int i = 0; i < 9; ++i) M(i / 3, i % 3) = U(rng);

  Vec3 v(U(rng), U(rng), U(rng));
  TensorN tv = TensorN::from_vec3(v);
  CHECK((apply_slot(M, tv, 0).to_vec3() - M * v).norm() < 1e-15);

  Mat3 A;
  for (int i = 0; i < 9; ++i) A(i / 3, i % 3) = U(rng);
  TensorN ta = TensorN::from_mat3(A);
  CHECK((apply_slot(M, ta, 0).to_mat3() - M * A).norm() < 1e-14);
  CHECK((apply_slot(M, ta, 1).to_mat3() - A * M.transpose()).norm() < 1e-14);
  CHECK((apply_all_slots(M, ta).to_mat3() - M * A * M.transpose()).norm() < 1e-14);

  // rank 3: slot-2 application contracts the innermost index
  TensorN t3 = TensorN::zero(3);
  for (int i = 0; i < 27; ++i) t3.a[i] = U(rng);
  TensorN r = apply_slot(M, t3, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        double want = 0.0;
        for (int l = 0; l < 3; ++l) want += M(k, l) * t3.a[9 * i + 3 * j + l];
        CHECK(r.a[9 * i + 3 * j + k] == doctest::Approx(want).epsilon(1e-14));
      }
}

TEST_CASE("rank 1 and 2 wrappers match the rank-n path bitwise") {
  CellFrames F = cone_frames(16, 10);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Stencil s = make_stencil(
      {{-2, 1.0 / 12}, {-1, -2.0 / 3}, {1, 2.0 / 3}, {2, -1.0 / 12}});

  std::vector<Vec3> u1(F.cells());
  std::vector<Mat3> u2(F.cells());
  std::vector<TensorN> t1(F.cells()), t2(F.cells());
  for (int i = 0; i < F.cells(); ++i) {
    u1[i] = Vec3(U(rng), U(rng), U(rng));
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) u2[i](r, c) = U(rng);
    t1[i] = TensorN::from_vec3(u1[i]);
    t2[i] = TensorN::from_mat3(u2[i]);
  }

  CovariantOperator op1 = make_covariant_operator(s, 1, 1, F);
  CovariantOperator op2 = make_covariant_operator(s, 1, 2, F);
  for (int i = 0; i < F.cells(); ++i) {
    Vec3 a = covariant_derivative_rank1(op1, i, u1);
    Vec3 b = covariant_derivative_rankn(op1, i, t1).to_vec3();
    for (int k = 0; k < 3; ++k) CHECK(a(k) == b(k));
    Mat3 A = covariant_derivative_rank2(op2, i, u2);
    Mat3 B = covariant_derivative_rankn(op2, i, t2).to_mat3();
    for (int k = 0; k < 9; ++k) CHECK(A(k / 3, k % 3) == B(k / 3, k % 3));
  }
}

TEST_CASE("transformation law") {
  CellFrames F = cone_frames(16, 10);
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Stencil s = make_stencil(
      {{-2, 1.0 / 12}, {-1, -2.0 / 3}, {1, 2.0 / 3}, {2, -1.0 / 12}});

  for (int rank = 1; rank <= 3; ++rank) {
    CovariantOperator op = make_covariant_operator(s, 1, rank, F);
    std::vector<TensorN> u(F.cells());
    for (auto& t : u) {
      t = TensorN::zero(rank);
      for (int k = 0; k < t.size(); ++k) t.a[k] = U(rng);
    }
    for (int trial = 0; trial < 40; ++trial) {
      int c = static_cast<int>(rng() % F.cells());
      TensorN cd = covariant_derivative_rankn(op, c, u);
      // J_c applied to every slot of the covariant derivative equals the
      // plain stencil acting on globally transformed tensors
      TensorN lhs = apply_all_slots(F.cell[c].J, cd);
      TensorN rhs = TensorN::zero(rank);
      for (const auto& e : s.entries) {
        int o = offset_cell(F, c, 1, e.offset);
        TensorN g = apply_all_slots(F.cell[o].J, u[o]);
        for (int k = 0; k < rhs.size(); ++k) rhs.a[k] += e.coeff * g.a[k];
      }
      for (int k = 0; k < lhs.size(); ++k)
        CHECK(std::abs(lhs.a[k] - rhs.a[k]) <= 1e-12 * (1.0 + std::abs(rhs.a[k])));
    }
  }
}

TEST_CASE("parallel transport equals the basis change") {
  CellFrames F = cone_frames(16, 10);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    int i = static_cast<int>(rng() % F.cells());
    int j = F.right(i);
    Mat3 K = F.cell[i].J_inv * F.cell[j].J;

    Vec3 v(U(rng), U(rng), U(rng));
    Vec3 pt = parallel_transport_rank1(F, i, j, v);
    CHECK((pt - K * v).norm() < 1e-13 * (1.0 + v.norm()));

    Mat3 A;
    for (int k = 0; k < 9; ++k) A(k / 3, k % 3) = U(rng);
    Mat3 PT = parallel_transport_rank2(F, i, j, A);
    CHECK((PT - K * A * K.transpose()).norm() < 1e-13 * (1.0 + A.norm()));
  }
}

TEST_CASE("transport is exact on flat frames") {
  CellFrames F = make_flat_frames(8, 4, true, 0.7, 1.3);
  Vec3 v(1.5, -2.0, 0.25);
  Vec3 pt = parallel_transport_rank1(F, 3, 4, v);
  for (int k = 0; k < 3; ++k) CHECK(pt(k) == v(k));
}

TEST_CASE("reference christoffel oracle") {
  // flat chart: zero symbols
  auto flatJ = [](const Vec3&) { return Mat3::Identity().eval(); };
  Mat3 g = reference_christoffel(flatJ, Vec3(0.3, 0.4, 0.0), 0);
  CHECK(g.norm() < 1e-8);

  // polar chart x = (r cos p, r sin p): Gamma_r has (d/dr J) terms
  auto polarJ = [](const Vec3& x) {
    double r = x(0), p = x(1);
    Mat3 J;
    J << std::cos(p), -r * std::sin(p), 0, std::sin(p), r * std::cos(p), 0, 0, 0, 1;
    return J;
  };
  Mat3 gr = reference_christoffel(polarJ, Vec3(2.0, 0.7, 0.0), 0);
  CHECK(gr(1, 1) == doctest::Approx(1.0 / 2.0).epsilon(1e-5));  // Gamma^p_{r p}
  Mat3 gp = reference_christoffel(polarJ, Vec3(2.0, 0.7, 0.0), 1);
  CHECK(gp(0, 1) == doctest::Approx(-2.0).epsilon(1e-5));  // Gamma^r_{p p}
  CHECK(gp(1, 0) == doctest::Approx(1.0 / 2.0).epsilon(1e-5));
}

TEST_CASE("offset_cell bounds") {
  CellFrames F = make_flat_frames(8, 4);
  CHECK(offset_cell(F, 0, 1, -1) == 7);
  CHECK(offset_cell(F, 0, 2, 1) == 8);
  CHECK_THROWS_AS(offset_cell(F, 0, 2, -1), TensorError);
  CHECK_THROWS_AS(offset_cell(F, 31, 2, 1), TensorError);
}
