#ifndef CONICAL_SOLVER_HPP
#define CONICAL_SOLVER_HPP

#include "conical/discretization.hpp"

namespace conical {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ContinuationSchedule {
  int num_increments = 20;
  int max_newton_iters = 30;
  double tol = 1e-9;
  double damping = 0.5;  // step shrink factor when positivity fails
  int max_dampings = 10;
  bool geometric = false;     // wall fraction sequence; default linear
  double geometric_ratio = 0.7;
  bool record_iterates = false;
  bool verbose = false;

  double wall_fraction(int increment) const;  // increment in 1..num_increments
};

struct TraceRow {
  int increment = 0;
  int iteration = 0;
  double res_l2 = 0.0;
  double res_linf = 0.0;
  double max_divb = 0.0;
  int dampings = 0;
};

struct SolveResult {
  Eigen::VectorXd U;
  std::vector<TraceRow> trace;
  bool converged = false;
  double final_residual = 0.0;
  double worst_kkt_rel = 0.0;   // mhd path: worst saddle-system relative residual
  std::string failure;          // non-empty only for aborted runs
  std::vector<Eigen::VectorXd> iterates;  // filled when record_iterates
};

SolveResult newton_solve_euler(const CaseSetup& setup, const ContinuationSchedule& sch);
SolveResult newton_solve_mhd(const CaseSetup& setup, const ContinuationSchedule& sch);

/* One Newton update U - J^-1 F via sparse LU with iterative refinement. */
Eigen::VectorXd newton_step(const SpMat& J, const Eigen::VectorXd& F,
                            const Eigen::VectorXd& U);

/* Equality-constrained least squares: minimize |J u - b|_2 subject to C u = z,
 * solved through the saddle system [[2 J^T J, C^T], [C, 0]]. Returns u. */
Eigen::VectorXd solve_kkt(const SpMat& J, const Eigen::VectorXd& b, const SpMat& C,
                          const Eigen::VectorXd& z, double* rel_residual = nullptr);

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path,
                     bool mhd);

}  // namespace conical

#endif
