#ifndef CONICAL_DISCRETIZATION_HPP
#define CONICAL_DISCRETIZATION_HPP

#include "conical/physics.hpp"
#include "conical/tensor.hpp"

#include <Eigen/Sparse>

namespace conical {

struct DiscretizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using SpMat = Eigen::SparseMatrix<double>;

/* Difference and dissipation stencils. Direction-2 offsets count rows; the
 * azimuthal direction always uses the periodic interior stencils. */
struct StencilBank {
  Stencil interior_d1;
  Stencil interior_d2;
  Stencil near_top_d2;
  Stencil near_bottom_d2;
  Stencil bottom_d2;
  Stencil visc1;
  Stencil visc2;
  Stencil bottom_visc2;
  double c_visc = 0.5;
};

StencilBank build_stencil_bank(double c_visc = 0.5);

/* Folded per-cell covariant operator entry: the pair corrections collapse to
 * coeff * K with K = J_c^-1 J_o applied to every tensor slot. */
struct CdEntry {
  int cell;
  double coeff;
  Mat3 K;
};

/* Problem setup: frames, gas, free stream, and precomputed operator tables.
 * State vector layout is cell-major with per-cell variables
 * (rho, v1, v2, v3, e[, b1, b2, b3]). */
struct CaseSetup {
  const CellFrames* frames = nullptr;
  StencilBank bank;
  GasModel gas;
  FreeStream fs;
  bool mhd = false;

  std::vector<Vec3> v_fs;  // local free-stream velocity per cell
  std::vector<Vec3> b_fs;
  double e_fs = 0.0;
  double rho_fs = 1.0;

  std::vector<std::vector<CdEntry>> cd1, cd2;  // flux derivative stencils
  std::vector<std::vector<CdEntry>> visc;      // dissipation, coeff includes C
  SpMat divb;                                  // W(H-1) x n constraint rows (mhd)

  int nvars() const { return mhd ? 8 : 5; }
  int unknowns() const { return nvars() * frames->cells(); }
};

CaseSetup make_case_setup(const CellFrames& frames, const GasModel& gas,
                          const FreeStream& fs, bool mhd, const StencilBank& bank);

/* Uniform free-stream state vector (the continuation start). */
Eigen::VectorXd freestream_state_vector(const CaseSetup& s);

/* Overwrite wall-row pinned values: v2 (and b2 for mhd) to fraction times the
 * local free-stream value. */
void apply_wall_bc(const CaseSetup& s, Eigen::VectorXd& U, double fraction);

/* Steady residuals. Dirichlet top rows and the wall pins appear as identity
 * equations value - target. */
Eigen::VectorXd assemble_euler_residual(const CaseSetup& s, const Eigen::VectorXd& U,
                                        double wall_fraction);
Eigen::VectorXd assemble_mhd_residual(const CaseSetup& s, const Eigen::VectorXd& U,
                                      double wall_fraction);

/* Analytic residual Jacobian (either system, per setup.mhd). */
SpMat assemble_jacobian(const CaseSetup& s, const Eigen::VectorXd& U);

struct ResidualSystem {
  Eigen::VectorXd residual;
  SpMat jacobian;
  SpMat divB;
  double c_visc = 0.0;
};

ResidualSystem assemble_system(const CaseSetup& s, const Eigen::VectorXd& U,
                               double wall_fraction, bool with_jacobian = true);

/* Constraint rows and targets for the constrained (mhd) path: divB rows,
 * all top-row pins, and the wall pins at the given fraction. */
void constraint_rows(const CaseSetup& s, double wall_fraction, SpMat& C,
                     Eigen::VectorXd& Z);

/* Effective worker count: CONICAL_THREADS caps std::thread parallelism. */
int thread_count();

void write_sparse_triplets(const SpMat& A, const std::string& path);

}  // namespace conical

#endif
