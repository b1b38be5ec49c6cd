#ifndef CONICAL_PHYSICS_HPP
#define CONICAL_PHYSICS_HPP

#include "conical/mesh.hpp"

namespace conical {

struct PhysicsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GasModel {
  double gamma = 1.4;
};

void validate_gas(const GasModel& gas);

/* Nondimensional states in per-cell mesh components; the third velocity /
 * field slot is the radial one. */
struct EulerState {
  double rho = 1.0;
  Vec3 v = Vec3::Zero();
  double e = 1.0;
};

struct MHDState {
  double rho = 1.0;
  Vec3 v = Vec3::Zero();
  double e = 1.0;
  Vec3 b = Vec3::Zero();
};

/* Free-stream description. Angles in radians; b_cartesian holds the fixed
 * Cartesian magnetic components (zero for gas dynamics). */
struct FreeStream {
  double mach = 2.0;
  double aoa = 0.0;
  double roll = 0.0;
  Vec3 b_cartesian = Vec3::Zero();
};

double pressure(const GasModel& gas, double rho, double e);

/* Specific total energy e + |v|^2/2 with the cell metric. */
double total_energy(const EulerState& s, const Mat3& G);

/* Unit free-stream velocity (-sin(roll)sin(aoa), cos(roll)sin(aoa), cos(aoa)). */
Vec3 freestream_velocity(const FreeStream& fs);

/* Free-stream internal energy 1/(gamma (gamma-1) M^2); pressure follows as
 * (gamma-1) rho e = 1/(gamma M^2). */
double freestream_energy(const GasModel& gas, double mach);
double freestream_pressure(const GasModel& gas, double mach);

/* Magnetic field helpers: perpendicular-upward to the stream (magnitude along
 * (0, cos(aoa), -sin(aoa))) and stream-aligned. */
Vec3 freestream_b_perp_up(const FreeStream& fs, double magnitude);
Vec3 freestream_b_stream(const FreeStream& fs, double magnitude);

/* Fast magnetoacoustic speed for sound speed squared a2, field b, and a
 * propagation direction w (normalized internally), all measured with metric
 * G: cf^2 = ((a2+|b|^2) + sqrt((a2+|b|^2)^2 - 4 a2 (b.w)^2)) / 2. */
double fast_magnetoacoustic_speed(double a2, const Vec3& b, const Vec3& w,
                                  const Mat3& G = Mat3::Identity());

/* Gate: supersonic and |b|^2 < 1 - 1/M^2 (Cartesian components). Throws
 * PhysicsError with a reason. */
void validate_freestream(const GasModel& gas, const FreeStream& fs);

/* Flux tensors in mesh components. Row = tensor component slot, column =
 * contraction (direction) slot. */
struct EulerFluxes {
  Vec3 mass;
  Mat3 mom;
  Vec3 energy;
};

struct MHDFluxes {
  Vec3 mass;
  Mat3 mom;
  Vec3 energy;
  Mat3 induction;
};

EulerFluxes euler_fluxes(const GasModel& gas, const EulerState& s, const CellFrame& f);
MHDFluxes mhd_fluxes(const GasModel& gas, const MHDState& s, const CellFrame& f);

/* Analytic flux derivatives with respect to (rho, v, e[, b]). Momentum and
 * induction blocks are flattened row-major: row 3k+j is component (k, j). */
struct EulerFluxJac {
  Eigen::Matrix<double, 3, 5> mass;
  Eigen::Matrix<double, 9, 5> mom;
  Eigen::Matrix<double, 3, 5> energy;
};

struct MHDFluxJac {
  Eigen::Matrix<double, 3, 8> mass;
  Eigen::Matrix<double, 9, 8> mom;
  Eigen::Matrix<double, 3, 8> energy;
  Eigen::Matrix<double, 9, 8> induction;
};

EulerFluxJac euler_flux_jacobians(const GasModel& gas, const EulerState& s,
                                  const CellFrame& f);
MHDFluxJac mhd_flux_jacobians(const GasModel& gas, const MHDState& s, const CellFrame& f);

/* Powell source coefficient vector (0, b, v.b, v) and its state derivative. */
struct PowellCoeff {
  Eigen::Matrix<double, 8, 1> c;
  Eigen::Matrix<double, 8, 8> dc;
};

PowellCoeff powell_coefficients(const MHDState& s, const Mat3& G);

}  // namespace conical

#endif
