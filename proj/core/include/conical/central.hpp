#ifndef CONICAL_CENTRAL_HPP
#define CONICAL_CENTRAL_HPP

#include "conical/tensor.hpp"

#include <functional>
#include <vector>

namespace conical {

inline constexpr double kDefaultCFL = 0.45;

double minmod(double x, double y);

/* Demonstration semi-discrete central scheme. Cell values are Vec3; scalar
 * problems (rank 0) use component 0 and skip transport. Fluxes and wave
 * speeds may read the local frame (metric) but have no explicit spatial
 * dependence. */
struct SchemeState {
  const CellFrames* frames = nullptr;
  int rank = 1;       // 0 scalar, 1 vector
  double dx = 1.0;    // mesh spacing, direction 1
  double dy = 1.0;    // mesh spacing, direction 2
  std::vector<Vec3> u;
};

struct SchemeProblem {
  std::function<Vec3(const CellFrame&, const Vec3&)> flux1;
  std::function<double(const CellFrame&, const Vec3&)> speed1;
  std::function<Vec3(const CellFrame&, const Vec3&)> flux2;
  std::function<double(const CellFrame&, const Vec3&)> speed2;
};

/* Componentwise minmod of the backward and forward two-point covariant
 * differences in the given direction. */
Vec3 covariant_slope(const SchemeState& s, int cell, int direction);

/* Second-order interface values of one cell: value at its left interface
 * (u - slope/2) and right interface (u + slope/2). */
std::pair<Vec3, Vec3> reconstruct_interfaces(const Vec3& u, const Vec3& slope);

/* Semi-discrete right-hand sides. The covariant versions wrap neighbor
 * values and neighbor fluxes in parallel transport; the cartesian versions
 * are the plain flat-space scheme with identical arithmetic structure. */
std::vector<Vec3> rhs_1d(const SchemeState& s, const SchemeProblem& p);
std::vector<Vec3> rhs_1d_cartesian(const SchemeState& s, const SchemeProblem& p);
std::vector<Vec3> rhs_2d(const SchemeState& s, const SchemeProblem& p);
std::vector<Vec3> rhs_2d_cartesian(const SchemeState& s, const SchemeProblem& p);

/* Heun step: average of the forward-Euler predictor and its corrector. */
void step_ssp2(SchemeState& s, double dt,
               const std::function<std::vector<Vec3>(const SchemeState&)>& rhs);

}  // namespace conical

#endif
