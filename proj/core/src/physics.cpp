#include "conical/physics.hpp"

#include <cmath>

namespace conical {

void validate_gas(const GasModel& gas) {
  if (!(gas.gamma > 1.0)) throw PhysicsError("gamma must exceed 1");
}

double pressure(const GasModel& gas, double rho, double e) {
  return (gas.gamma - 1.0) * rho * e;
}

double total_energy(const EulerState& s, const Mat3& G) {
  return s.e + 0.5 * s.v.dot(G * s.v);
}

Vec3 freestream_velocity(const FreeStream& fs) {
  const double sa = std::sin(fs.aoa), ca = std::cos(fs.aoa);
  const double sr = std::sin(fs.roll), cr = std::cos(fs.roll);
  return Vec3(-sr * sa, cr * sa, ca);
}

double freestream_energy(const GasModel& gas, double mach) {
  return 1.0 / (gas.gamma * (gas.gamma - 1.0) * mach * mach);
}

double freestream_pressure(const GasModel& gas, double mach) {
  return 1.0 / (gas.gamma * mach * mach);
}

Vec3 freestream_b_perp_up(const FreeStream& fs, double magnitude) {
  return magnitude * Vec3(0.0, std::cos(fs.aoa), -std::sin(fs.aoa));
}

Vec3 freestream_b_stream(const FreeStream& fs, double magnitude) {
  return magnitude * freestream_velocity(fs);
}

double fast_magnetoacoustic_speed(double a2, const Vec3& b, const Vec3& w, const Mat3& G) {
  const double bb = b.dot(G * b);
  const double ww = w.dot(G * w);
  const double bw2 = (ww > 0.0) ? (b.dot(G * w)) * (b.dot(G * w)) / ww : 0.0;
  const double s = a2 + bb;
  const double disc = std::max(0.0, s * s - 4.0 * a2 * bw2);
  return std::sqrt(0.5 * (s + std::sqrt(disc)));
}

void validate_freestream(const GasModel& gas, const FreeStream& fs) {
  validate_gas(gas);
  if (!(fs.mach > 1.0))
    throw PhysicsError("free stream must be supersonic (mach > 1)");
  const double limit = 1.0 - 1.0 / (fs.mach * fs.mach);
  if (!(fs.b_cartesian.squaredNorm() < limit))
    throw PhysicsError("free-stream field too strong: |b|^2 must stay below 1 - 1/M^2");
}

EulerFluxes euler_fluxes(const GasModel& gas, const EulerState& s, const CellFrame& f) {
  EulerFluxes F;
  const double P = pressure(gas, s.rho, s.e);
  const double H = s.rho * total_energy(s, f.G) + P;
  F.mass = s.rho * s.v;
  F.mom = s.rho * s.v * s.v.transpose() + f.G_inv * P;
  F.energy = H * s.v;
  return F;
}

MHDFluxes mhd_fluxes(const GasModel& gas, const MHDState& s, const CellFrame& f) {
  MHDFluxes F;
  const double P = pressure(gas, s.rho, s.e);
  const double bb = s.b.dot(f.G * s.b);
  const double vb = s.v.dot(f.G * s.b);
  const EulerState gs{s.rho, s.v, s.e};
  const double H = s.rho * total_energy(gs, f.G) + P + bb;
  F.mass = s.rho * s.v;
  F.mom = s.rho * s.v * s.v.transpose() - s.b * s.b.transpose() +
          f.G_inv * (P + 0.5 * bb);
  F.energy = H * s.v - vb * s.b;
  F.induction = s.b * s.v.transpose() - s.v * s.b.transpose();
  return F;
}

EulerFluxJac euler_flux_jacobians(const GasModel& gas, const EulerState& s,
                                  const CellFrame& f) {
  EulerFluxJac J;
  J.mass.setZero();
  J.mom.setZero();
  J.energy.setZero();
  const double g = gas.gamma;
  const Vec3 Gv = f.G * s.v;
  const double v2 = s.v.dot(Gv);
  const double Ht = g * s.rho * s.e + 0.5 * s.rho * v2;

  for (int j = 0; j < 3; ++j) {
    J.mass(j, 0) = s.v(j);
    J.mass(j, 1 + j) = s.rho;
    J.energy(j, 0) = (g * s.e + 0.5 * v2) * s.v(j);
    for (int m = 0; m < 3; ++m) J.energy(j, 1 + m) = s.rho * s.v(j) * Gv(m);
    J.energy(j, 1 + j) += Ht;
    J.energy(j, 4) = g * s.rho * s.v(j);
    for (int k = 0; k < 3; ++k) {
      const int r = 3 * k + j;
      J.mom(r, 0) = s.v(k) * s.v(j) + f.G_inv(k, j) * (g - 1.0) * s.e;
      J.mom(r, 1 + k) += s.rho * s.v(j);
      J.mom(r, 1 + j) += s.rho * s.v(k);
      J.mom(r, 4) = f.G_inv(k, j) * (g - 1.0) * s.rho;
    }
  }
  return J;
}

MHDFluxJac mhd_flux_jacobians(const GasModel& gas, const MHDState& s, const CellFrame& f) {
  MHDFluxJac J;
  J.mass.setZero();
  J.mom.setZero();
  J.energy.setZero();
  J.induction.setZero();
  const double g = gas.gamma;
  const Vec3 Gv = f.G * s.v;
  const Vec3 Gb = f.G * s.b;
  const double v2 = s.v.dot(Gv);
  const double bb = s.b.dot(Gb);
  const double vb = s.v.dot(Gb);
  const double Hm = g * s.rho * s.e + 0.5 * s.rho * v2 + bb;

  for (int j = 0; j < 3; ++j) {
    J.mass(j, 0) = s.v(j);
    J.mass(j, 1 + j) = s.rho;

    J.energy(j, 0) = (g * s.e + 0.5 * v2) * s.v(j);
    for (int m = 0; m < 3; ++m) {
      J.energy(j, 1 + m) = s.rho * s.v(j) * Gv(m) - Gb(m) * s.b(j);
      J.energy(j, 5 + m) = 2.0 * Gb(m) * s.v(j) - Gv(m) * s.b(j);
    }
    J.energy(j, 1 + j) += Hm;
    J.energy(j, 4) = g * s.rho * s.v(j);
    J.energy(j, 5 + j) += -vb;

    for (int k = 0; k < 3; ++k) {
      const int r = 3 * k + j;
      J.mom(r, 0) = s.v(k) * s.v(j) + f.G_inv(k, j) * (g - 1.0) * s.e;
      J.mom(r, 1 + k) += s.rho * s.v(j);
      J.mom(r, 1 + j) += s.rho * s.v(k);
      J.mom(r, 4) = f.G_inv(k, j) * (g - 1.0) * s.rho;
      for (int m = 0; m < 3; ++m) J.mom(r, 5 + m) = f.G_inv(k, j) * Gb(m);
      J.mom(r, 5 + k) += -s.b(j);
      J.mom(r, 5 + j) += -s.b(k);

      J.induction(r, 1 + j) += s.b(k);
      J.induction(r, 1 + k) += -s.b(j);
      J.induction(r, 5 + k) += s.v(j);
      J.induction(r, 5 + j) += -s.v(k);
    }
  }
  return J;
}

PowellCoeff powell_coefficients(const MHDState& s, const Mat3& G) {
  PowellCoeff P;
  P.c.setZero();
  P.dc.setZero();
  const Vec3 Gv = G * s.v;
  const Vec3 Gb = G * s.b;
  for (int k = 0; k < 3; ++k) {
    P.c(1 + k) = s.b(k);
    P.dc(1 + k, 5 + k) = 1.0;
    P.c(5 + k) = s.v(k);
    P.dc(5 + k, 1 + k) = 1.0;
    P.dc(4, 1 + k) = Gb(k);
    P.dc(4, 5 + k) = Gv(k);
  }
  P.c(4) = s.v.dot(Gb);
  return P;
}

}  // namespace conical
