#ifndef CONICAL_TENSOR_HPP
#define CONICAL_TENSOR_HPP

#include "conical/mesh.hpp"

#include <functional>
#include <vector>

namespace conical {

struct TensorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StencilEntry {
  int offset;
  double coeff;
};

/* One-dimensional difference stencil along a mesh direction. Offsets are in
 * cells along that direction (direction 2 offsets count rows). Coefficients
 * must sum to zero within 1e-14. */
struct Stencil {
  std::vector<StencilEntry> entries;
  int anchor = 0;
};

Stencil make_stencil(std::initializer_list<StencilEntry> entries, int anchor = 0);
double stencil_coefficient_sum(const Stencil& s);
void validate_stencil(const Stencil& s);

struct DiffPair {
  double weight;
  int plus;
  int minus;
};

struct DifferencePairs {
  std::vector<DiffPair> pairs;
};

/* Rewrite a sum-to-zero stencil as weighted two-point differences.
 * Mirrored offsets about the anchor with exactly opposite coefficients pair
 * symmetrically (weight = coefficient on the far side, emitted by distance);
 * whatever remains is paired against the first remaining entry, which always
 * works because the coefficients sum to zero. Reconstruction is exact. */
DifferencePairs decompose_to_differences(const Stencil& s);

/* Dense rank-n tensor over the 3 mesh-coordinate slots, n <= 3. */
struct TensorN {
  int rank = 0;
  std::array<double, 27> a{};

  static int size_of(int rank);
  int size() const { return size_of(rank); }

  static TensorN zero(int rank);
  static TensorN from_vec3(const Vec3& v);
  static TensorN from_mat3(const Mat3& m);
  Vec3 to_vec3() const;
  Mat3 to_mat3() const;
};

/* Apply a 3x3 matrix to one slot / all slots of a tensor. */
TensorN apply_slot(const Mat3& M, const TensorN& T, int slot);
TensorN apply_all_slots(const Mat3& M, const TensorN& T);

/* A discrete covariant derivative: a decomposed stencil bound to a mesh
 * direction and a frame field. */
struct CovariantOperator {
  int direction = 1;  // 1 = azimuthal (periodic), 2 = radial rows
  int rank = 1;
  DifferencePairs pairs;
  const CellFrames* frames = nullptr;
};

CovariantOperator make_covariant_operator(const Stencil& s, int direction, int rank,
                                          const CellFrames& frames);

/* Resolve a directional offset from a cell; throws TensorError when the
 * stencil would leave the mesh. */
int offset_cell(const CellFrames& frames, int cell, int direction, int offset);

/* Discrete covariant derivative at one cell. Each difference pair (w, k+, k-)
 * contributes
 *   w [ (u+ - u-) + Pc^-1 (P+ u+ - Pc u+) + Pc^-1 (Pc u- - P- u-) ]
 * where P applies the cell Jacobian to every slot. The field is supplied in
 * per-cell mesh components. Rank 1 and 2 delegate to the rank-n path. */
TensorN covariant_derivative_rankn(const CovariantOperator& op, int cell,
                                   const std::function<TensorN(int)>& u);
TensorN covariant_derivative_rankn(const CovariantOperator& op, int cell,
                                   const std::vector<TensorN>& u);
Vec3 covariant_derivative_rank1(const CovariantOperator& op, int cell,
                                const std::vector<Vec3>& u);
Mat3 covariant_derivative_rank2(const CovariantOperator& op, int cell,
                                const std::vector<Mat3>& u);

/* Parallel transport of a neighbor value into cell i's basis:
 *   u_i = u_j - J_i^-1 (J_i u_j - J_j u_j)  (and the slot-wise analog). */
TensorN parallel_transport_rankn(const CellFrames& frames, int i, int j, const TensorN& u);
Vec3 parallel_transport_rank1(const CellFrames& frames, int i, int j, const Vec3& u);
Mat3 parallel_transport_rank2(const CellFrames& frames, int i, int j, const Mat3& u);

/* Reference Christoffel matrix (Gamma_k)^j_i = (J^-1 d J / d x^k)^j_i by
 * central differencing of a smooth Jacobian field; an oracle, not a solver
 * ingredient. */
Mat3 reference_christoffel(const std::function<Mat3(const Vec3&)>& J, const Vec3& x,
                           int k, double step = 1e-6);

}  // namespace conical

#endif
