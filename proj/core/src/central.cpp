#include "conical/central.hpp"

#include <cmath>

namespace conical {

double minmod(double x, double y) {
  const double sx = (x > 0.0) - (x < 0.0);
  const double sy = (y > 0.0) - (y < 0.0);
  return 0.5 * (sx + sy) * std::min(std::abs(x), std::abs(y));
}

namespace {

Vec3 transport(const SchemeState& s, int i, int j, const Vec3& v) {
  if (s.rank == 0) return v;
  return parallel_transport_rank1(*s.frames, i, j, v);
}

Vec3 vec_minmod(const Vec3& a, const Vec3& b) {
  return Vec3(minmod(a(0), b(0)), minmod(a(1), b(1)), minmod(a(2), b(2)));
}

}  // namespace

Vec3 covariant_slope(const SchemeState& s, int cell, int direction) {
  const CellFrames& F = *s.frames;
  if (s.rank == 0) {
    const int jm = offset_cell(F, cell, direction, -1);
    const int jp = offset_cell(F, cell, direction, +1);
    Vec3 r = Vec3::Zero();
    r(0) = minmod(s.u[cell](0) - s.u[jm](0), s.u[jp](0) - s.u[cell](0));
    return r;
  }
  const Stencil back{{{-1, -1.0}, {0, 1.0}}, 0};
  const Stencil fwd{{{0, -1.0}, {1, 1.0}}, 0};
  const CovariantOperator ob = make_covariant_operator(back, direction, 1, F);
  const CovariantOperator of = make_covariant_operator(fwd, direction, 1, F);
  const std::function<TensorN(int)> acc = [&s](int i) { return TensorN::from_vec3(s.u[i]); };
  const Vec3 cb = covariant_derivative_rankn(ob, cell, acc).to_vec3();
  const Vec3 cf = covariant_derivative_rankn(of, cell, acc).to_vec3();
  return vec_minmod(cb, cf);
}

std::pair<Vec3, Vec3> reconstruct_interfaces(const Vec3& u, const Vec3& slope) {
  return {u - 0.5 * slope, u + 0.5 * slope};
}

namespace {

/* One direction's contribution to the semi-discrete RHS at cell i. The
 * covariant flag switches parallel transport of neighbor data on; with it
 * off this is the plain central scheme, arithmetic ordering unchanged. */
Vec3 rhs_cell_dir(const SchemeState& s, const SchemeProblem& p, int i, int direction,
                  const std::vector<Vec3>& slope, bool covariant) {
  const CellFrames& F = *s.frames;
  const CellFrame& fi = F.cell[i];
  const auto& flux = (direction == 1) ? p.flux1 : p.flux2;
  const auto& speed = (direction == 1) ? p.speed1 : p.speed2;
  const double dx = (direction == 1) ? s.dx : s.dy;
  const int jr = offset_cell(F, i, direction, +1);
  const int jl = offset_cell(F, i, direction, -1);

  const auto [uLo, uRo] = reconstruct_interfaces(s.u[i], slope[i]);
  const Vec3 uRn_raw = reconstruct_interfaces(s.u[jr], slope[jr]).first;
  const Vec3 uLn_raw = reconstruct_interfaces(s.u[jl], slope[jl]).second;
  const Vec3 uRn = covariant ? transport(s, i, jr, uRn_raw) : uRn_raw;
  const Vec3 uLn = covariant ? transport(s, i, jl, uLn_raw) : uLn_raw;

  const Vec3 fRo = flux(fi, uRo);
  const Vec3 fLo = flux(fi, uLo);
  const Vec3 fRn = covariant ? transport(s, i, jr, flux(F.cell[jr], uRn_raw))
                             : flux(fi, uRn_raw);
  const Vec3 fLn = covariant ? transport(s, i, jl, flux(F.cell[jl], uLn_raw))
                             : flux(fi, uLn_raw);

  const double lamR = std::max(speed(fi, uRo), speed(fi, uRn));
  const double lamL = std::max(speed(fi, uLo), speed(fi, uLn));

  return -(fRn + fRo) / (2.0 * dx) + lamR / (2.0 * dx) * (uRn - uRo) +
         (fLo + fLn) / (2.0 * dx) - lamL / (2.0 * dx) * (uLo - uLn);
}

std::vector<Vec3> rhs_impl(const SchemeState& s, const SchemeProblem& p, bool two_d,
                           bool covariant) {
  const int n = s.frames->cells();
  std::vector<Vec3> s1(n), out(n);
  for (int i = 0; i < n; ++i)
    s1[i] = covariant ? covariant_slope(s, i, 1)
                      : vec_minmod(s.u[i] - s.u[offset_cell(*s.frames, i, 1, -1)],
                                   s.u[offset_cell(*s.frames, i, 1, +1)] - s.u[i]);
  std::vector<Vec3> s2;
  if (two_d) {
    s2.resize(n);
    for (int i = 0; i < n; ++i)
      s2[i] = covariant ? covariant_slope(s, i, 2)
                        : vec_minmod(s.u[i] - s.u[offset_cell(*s.frames, i, 2, -1)],
                                     s.u[offset_cell(*s.frames, i, 2, +1)] - s.u[i]);
  }
  for (int i = 0; i < n; ++i) {
    out[i] = rhs_cell_dir(s, p, i, 1, s1, covariant);
    if (two_d) out[i] += rhs_cell_dir(s, p, i, 2, s2, covariant);
  }
  return out;
}

}  // namespace

std::vector<Vec3> rhs_1d(const SchemeState& s, const SchemeProblem& p) {
  return rhs_impl(s, p, false, true);
}

std::vector<Vec3> rhs_1d_cartesian(const SchemeState& s, const SchemeProblem& p) {
  return rhs_impl(s, p, false, false);
}

std::vector<Vec3> rhs_2d(const SchemeState& s, const SchemeProblem& p) {
  return rhs_impl(s, p, true, true);
}

std::vector<Vec3> rhs_2d_cartesian(const SchemeState& s, const SchemeProblem& p) {
  return rhs_impl(s, p, true, false);
}

void step_ssp2(SchemeState& s, double dt,
               const std::function<std::vector<Vec3>(const SchemeState&)>& rhs) {
  const std::vector<Vec3> u0 = s.u;
  const std::vector<Vec3> k1 = rhs(s);
  for (std::size_t i = 0; i < s.u.size(); ++i) s.u[i] = u0[i] + dt * k1[i];
  const std::vector<Vec3> k2 = rhs(s);
  for (std::size_t i = 0; i < s.u.size(); ++i)
    s.u[i] = 0.5 * (u0[i] + (s.u[i] + dt * k2[i]));
}

}  // namespace conical
