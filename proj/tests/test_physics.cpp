#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "conical/physics.hpp"

#include <cmath>
#include <random>

using namespace conical;

namespace {
constexpr double kPi = 3.14159265358979323846;

CellFrame random_frame(std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-0.4, 0.4);
  CellFrame f;
  Mat3 J = Mat3::Identity();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) J(r, c) += U(rng);
  f.J = J;
  f.J_inv = J.inverse();
  f.G = J.transpose() * J;
  f.G_inv = f.J_inv * f.J_inv.transpose();
  return f;
}

MHDState random_mhd_state(std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  MHDState s;
  s.rho = 0.6 + 0.5 * std::abs(U(rng));
  s.v = Vec3(U(rng), U(rng), 1.0 + U(rng));
  s.e = 0.4 + 0.4 * std::abs(U(rng));
  s.b = 0.4 * Vec3(U(rng), U(rng), U(rng));
  return s;
}
}  // namespace

TEST_CASE("pressure and free-stream scalars") {
  GasModel gas;
  CHECK(pressure(gas, 1.0, 0.4464286) == doctest::Approx(0.1785714).epsilon(1e-6));
  CHECK(freestream_energy(gas, 2.0) == doctest::Approx(0.4464286).epsilon(1e-6));
  CHECK(freestream_energy(gas, 1.5) == doctest::Approx(0.7936508).epsilon(1e-6));
  CHECK(freestream_pressure(gas, 2.0) ==
        doctest::Approx(1.0 / (1.4 * 4.0)).epsilon(1e-12));
  CHECK(pressure(gas, 1.0, freestream_energy(gas, 2.0)) ==
        doctest::Approx(freestream_pressure(gas, 2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(validate_gas(GasModel{1.0}), PhysicsError);
}

TEST_CASE("free-stream direction") {
  FreeStream fs;
  fs.aoa = 0.0;
  CHECK((freestream_velocity(fs) - Vec3(0, 0, 1)).norm() < 1e-15);

  fs.aoa = 0.3;
  fs.roll = 0.0;
  Vec3 v = freestream_velocity(fs);
  CHECK((v - Vec3(0, std::sin(0.3), std::cos(0.3))).norm() < 1e-15);
  CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-15));

  fs.roll = 0.5 * kPi;
  v = freestream_velocity(fs);
  CHECK(v(0) == doctest::Approx(-std::sin(0.3)).epsilon(1e-12));
  CHECK(std::abs(v(1)) < 1e-12);
}

TEST_CASE("free-stream magnetic helpers") {
  FreeStream fs;
  fs.aoa = 0.35;
  fs.roll = 0.0;
  Vec3 bp = freestream_b_perp_up(fs, 0.4);
  CHECK(bp.norm() == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(std::abs(bp.dot(freestream_velocity(fs))) < 1e-14);
  CHECK((bp - 0.4 * Vec3(0, std::cos(0.35), -std::sin(0.35))).norm() < 1e-14);

  Vec3 bs = freestream_b_stream(fs, 0.25);
  CHECK((bs - 0.25 * freestream_velocity(fs)).norm() < 1e-14);
}

TEST_CASE("free-stream admissibility gate") {
  GasModel gas;
  FreeStream fs;
  fs.mach = 0.9;
  CHECK_THROWS_AS(validate_freestream(gas, fs), PhysicsError);

  fs.mach = 2.0;  // |b|^2 must stay below 1 - 1/M^2 = 0.75
  fs.b_cartesian = Vec3(0.87, 0, 0);
  CHECK_THROWS_AS(validate_freestream(gas, fs), PhysicsError);
  fs.b_cartesian = Vec3(0.86, 0, 0);
  CHECK_NOTHROW(validate_freestream(gas, fs));
}

TEST_CASE("fast magnetoacoustic speed") {
  // no field: sound speed
  CHECK(fast_magnetoacoustic_speed(0.25, Vec3::Zero(), Vec3(0, 0, 1)) ==
        doctest::Approx(0.5).epsilon(1e-14));
  // field orthogonal to the direction, M = 2 numbers
  double cf = fast_magnetoacoustic_speed(0.25, Vec3(0.4, 0, 0), Vec3(0, 0, 1));
  CHECK(cf * cf == doctest::Approx(0.41).epsilon(1e-12));
  // aligned field: max of sound and Alfven speeds
  cf = fast_magnetoacoustic_speed(0.25, Vec3(0, 0, 0.4), Vec3(0, 0, 1));
  CHECK(cf == doctest::Approx(0.5).epsilon(1e-12));
  cf = fast_magnetoacoustic_speed(0.25, Vec3(0, 0, 0.8), Vec3(0, 0, 1));
  CHECK(cf == doctest::Approx(0.8).epsilon(1e-12));
  // direction scaling must not matter
  CHECK(fast_magnetoacoustic_speed(0.3, Vec3(0.2, 0.1, 0), Vec3(0, 0, 2)) ==
        doctest::Approx(
            fast_magnetoacoustic_speed(0.3, Vec3(0.2, 0.1, 0), Vec3(0, 0, 1)))
            .epsilon(1e-13));
}

TEST_CASE("total energy uses the metric") {
  EulerState s;
  s.v = Vec3(1.0, 2.0, 0.0);
  s.e = 0.5;
  Mat3 G = Mat3::Identity() * 2.0;
  CHECK(total_energy(s, G) == doctest::Approx(0.5 + 0.5 * 2.0 * 5.0).epsilon(1e-14));
}

TEST_CASE("euler flux structure") {
  std::mt19937 rng(7);
  CellFrame f = random_frame(rng);
  GasModel gas;
  EulerState s;
  s.rho = 1.2;
  s.v = Vec3(0.3, -0.1, 1.7);
  s.e = 0.8;
  EulerFluxes fl = euler_fluxes(gas, s, f);
  CHECK((fl.mass - s.rho * s.v).norm() < 1e-14);
  double P = pressure(gas, s.rho, s.e);
  Mat3 want = s.rho * s.v * s.v.transpose() + f.G_inv * P;
  CHECK((fl.mom - want).norm() < 1e-13);
  double H = s.rho * total_energy(s, f.G) + P;
  CHECK((fl.energy - H * s.v).norm() < 1e-13);
}

TEST_CASE("mhd fluxes at zero field reduce to euler") {
  std::mt19937 rng(13);
  GasModel gas;
  for (int n = 0; n < 20; ++n) {
    CellFrame f = random_frame(rng);
    MHDState m = random_mhd_state(rng);
    m.b = Vec3::Zero();
    EulerState e{m.rho, m.v, m.e};
    MHDFluxes fm = mhd_fluxes(gas, m, f);
    EulerFluxes fe = euler_fluxes(gas, e, f);
    CHECK((fm.mass - fe.mass).norm() == 0.0);
    CHECK((fm.mom - fe.mom).norm() == 0.0);
    CHECK((fm.energy - fe.energy).norm() == 0.0);
    CHECK(fm.induction.norm() == 0.0);

    MHDFluxJac jm = mhd_flux_jacobians(gas, m, f);
    EulerFluxJac je = euler_flux_jacobians(gas, e, f);
    CHECK((jm.mass.leftCols<5>() - je.mass).norm() == 0.0);
    CHECK((jm.mom.leftCols<5>() - je.mom).norm() == 0.0);
    CHECK((jm.energy.leftCols<5>() - je.energy).norm() == 0.0);
  }
}

TEST_CASE("analytic flux jacobians match finite differences") {
  std::mt19937 rng(19);
  GasModel gas;
  double h = 1e-6;

  for (int n = 0; n < 25; ++n) {
    CellFrame f = random_frame(rng);
    MHDState s = random_mhd_state(rng);
    MHDFluxJac J = mhd_flux_jacobians(gas, s, f);

    auto pack = [](const MHDState& q) {
      Eigen::Matrix<double, 8, 1> u;
      u << q.rho, q.v(0), q.v(1), q.v(2), q.e, q.b(0), q.b(1), q.b(2);
      return u;
    };
    auto unpack = [](const Eigen::Matrix<double, 8, 1>& u) {
      return MHDState{u(0), Vec3(u(1), u(2), u(3)), u(4), Vec3(u(5), u(6), u(7))};
    };

    Eigen::Matrix<double, 8, 1> u0 = pack(s);
    for (int m = 0; m < 8; ++m) {
      auto up = u0, um = u0;
      up(m) += h;
      um(m) -= h;
      MHDFluxes fp = mhd_fluxes(gas, unpack(up), f);
      MHDFluxes fm = mhd_fluxes(gas, unpack(um), f);
      for (int k = 0; k < 3; ++k) {
        double fd = (fp.mass(k) - fm.mass(k)) / (2 * h);
        CHECK(std::abs(J.mass(k, m) - fd) < 1e-5 * (1.0 + std::abs(fd)));
        fd = (fp.energy(k) - fm.energy(k)) / (2 * h);
        CHECK(std::abs(J.energy(k, m) - fd) < 1e-5 * (1.0 + std::abs(fd)));
        for (int j = 0; j < 3; ++j) {
          fd = (fp.mom(k, j) - fm.mom(k, j)) / (2 * h);
          CHECK(std::abs(J.mom(3 * k + j, m) - fd) < 1e-5 * (1.0 + std::abs(fd)));
          fd = (fp.induction(k, j) - fm.induction(k, j)) / (2 * h);
          CHECK(std::abs(J.induction(3 * k + j, m) - fd) <
                1e-5 * (1.0 + std::abs(fd)));
        }
      }
    }

    // euler jacobian against finite differences as well
    EulerState es{s.rho, s.v, s.e};
    EulerFluxJac Je = euler_flux_jacobians(gas, es, f);
    for (int m = 0; m < 5; ++m) {
      auto up = u0, um = u0;
      up(m) += h;
      um(m) -= h;
      EulerFluxes fp =
          euler_fluxes(gas, {up(0), Vec3(up(1), up(2), up(3)), up(4)}, f);
      EulerFluxes fm =
          euler_fluxes(gas, {um(0), Vec3(um(1), um(2), um(3)), um(4)}, f);
      for (int k = 0; k < 3; ++k) {
        double fd = (fp.mass(k) - fm.mass(k)) / (2 * h);
        CHECK(std::abs(Je.mass(k, m) - fd) < 1e-5 * (1.0 + std::abs(fd)));
        fd = (fp.energy(k) - fm.energy(k)) / (2 * h);
        CHECK(std::abs(Je.energy(k, m) - fd) < 1e-5 * (1.0 + std::abs(fd)));
        for (int j = 0; j < 3; ++j) {
          fd = (fp.mom(k, j) - fm.mom(k, j)) / (2 * h);
          CHECK(std::abs(Je.mom(3 * k + j, m) - fd) < 1e-5 * (1.0 + std::abs(fd)));
        }
      }
    }
  }
}

TEST_CASE("powell coefficients") {
  std::mt19937 rng(37);
  CellFrame f = random_frame(rng);
  MHDState s = random_mhd_state(rng);
  PowellCoeff pc = powell_coefficients(s, f.G);

  CHECK(pc.c(0) == 0.0);
  CHECK((Vec3(pc.c(1), pc.c(2), pc.c(3)) - s.b).norm() == 0.0);
  CHECK(pc.c(4) == doctest::Approx(s.v.dot(f.G * s.b)).epsilon(1e-14));
  CHECK((Vec3(pc.c(5), pc.c(6), pc.c(7)) - s.v).norm() == 0.0);

  // derivative check
  double h = 1e-7;
  for (int m = 0; m < 8; ++m) {
    MHDState sp = s, sm = s;
    auto bump = [&](MHDState& q, double d) {
      if (m == 0)
        q.rho += d;
      else if (m <= 3)
        q.v(m - 1) += d;
      else if (m == 4)
        q.e += d;
      else
        q.b(m - 5) += d;
    };
    bump(sp, h);
    bump(sm, -h);
    auto cp = powell_coefficients(sp, f.G).c;
    auto cm = powell_coefficients(sm, f.G).c;
    for (int r = 0; r < 8; ++r) {
      double fd = (cp(r) - cm(r)) / (2 * h);
      CHECK(std::abs(pc.dc(r, m) - fd) < 1e-6 * (1.0 + std::abs(fd)));
    }
  }
}
