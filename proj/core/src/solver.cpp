#include "conical/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>

#include <Eigen/SparseLU>

namespace conical {

double ContinuationSchedule::wall_fraction(int increment) const {
  if (increment >= num_increments) return 0.0;
  if (geometric) return std::pow(geometric_ratio, increment);
  return static_cast<double>(num_increments - increment) / num_increments;
}

namespace {

using LU = Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>;

/* rhs - A x accumulated in extended precision. */
Eigen::VectorXd residual_ld(const SpMat& A, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& rhs) {
  std::vector<long double> acc(A.rows());
  for (int i = 0; i < A.rows(); ++i) acc[i] = static_cast<long double>(rhs(i));
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      acc[it.row()] -= static_cast<long double>(it.value()) *
                       static_cast<long double>(x(it.col()));
  Eigen::VectorXd r(A.rows());
  for (int i = 0; i < A.rows(); ++i) r(i) = static_cast<double>(acc[i]);
  return r;
}

void refine(const SpMat& A, const Eigen::VectorXd& rhs, LU& lu, Eigen::VectorXd& x,
            int rounds = 2) {
  for (int it = 0; it < rounds; ++it) {
    Eigen::VectorXd r = residual_ld(A, x, rhs);
    x += lu.solve(r);
  }
}

bool states_positive(const CaseSetup& s, const Eigen::VectorXd& U) {
  int nv = s.nvars();
  int N = s.frames->cells();
  for (int i = 0; i < N; ++i)
    if (!(U(i * nv) > 0.0) || !(U(i * nv + 4) > 0.0)) return false;
  return true;
}

}  // namespace

Eigen::VectorXd newton_step(const SpMat& J, const Eigen::VectorXd& F,
                            const Eigen::VectorXd& U) {
  LU lu;
  lu.compute(J);
  if (lu.info() != Eigen::Success) throw SolverError("jacobian factorization failed");
  Eigen::VectorXd rhs = -F;
  Eigen::VectorXd d = lu.solve(rhs);
  refine(J, rhs, lu, d);
  return U + d;
}

Eigen::VectorXd solve_kkt(const SpMat& J, const Eigen::VectorXd& b, const SpMat& C,
                          const Eigen::VectorXd& z, double* rel_residual) {
  int n = static_cast<int>(J.cols());
  int m = static_cast<int>(C.rows());
  int nr = static_cast<int>(J.rows());
  if (C.cols() != n || z.size() != m || b.size() != nr)
    throw SolverError("solve_kkt: inconsistent dimensions");

  /* Augmented form of  min |Ju - b|^2  s.t.  Cu = z, with the residual
   * r = Ju - b kept as an unknown:
   *   [ I  J  0 ] [r]   [b]
   *   [ J' 0  C'] [u] = [0]
   *   [ 0  C  0 ] [l]   [z]
   * This avoids forming J'J, which would square the conditioning. */
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(nr + 2 * J.nonZeros() + 2 * C.nonZeros());
  for (int i = 0; i < nr; ++i) trips.emplace_back(i, i, 1.0);
  for (int k = 0; k < J.outerSize(); ++k)
    for (SpMat::InnerIterator it(J, k); it; ++it) {
      int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      trips.emplace_back(r, nr + c, it.value());
      trips.emplace_back(nr + c, r, it.value());
    }
  for (int k = 0; k < C.outerSize(); ++k)
    for (SpMat::InnerIterator it(C, k); it; ++it) {
      int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      trips.emplace_back(nr + n + r, nr + c, it.value());
      trips.emplace_back(nr + c, nr + n + r, it.value());
    }
  SpMat A(nr + n + m, nr + n + m);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nr + n + m);
  rhs.head(nr) = b;
  rhs.tail(m) = z;

  LU lu;
  lu.compute(A);
  Eigen::VectorXd y;
  double rel = std::numeric_limits<double>::infinity();
  if (lu.info() == Eigen::Success) {
    y = lu.solve(rhs);
    refine(A, rhs, lu, y);
    rel = residual_ld(A, y, rhs).norm() / std::max(rhs.norm(), 1e-300);
  }

  if (!(rel < 1e-6) && m <= 512 && n <= 4096) {
    // Singular or near-singular saddle, typically dependent constraint rows:
    // drop them and solve the reduced problem.
    Eigen::MatrixXd Cd(C);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Cd.transpose());
    int rank = static_cast<int>(qr.rank());
    if (rank < m) {
      std::cerr << "solve_kkt: constraint rows rank deficient (" << rank << "/" << m
                << "), deflating dependent rows\n";
      const auto& perm = qr.colsPermutation().indices();
      std::vector<int> keep(perm.data(), perm.data() + rank);
      std::sort(keep.begin(), keep.end());
      std::vector<Eigen::Triplet<double>> ct;
      Eigen::SparseMatrix<double, Eigen::RowMajor> Crm(C);
      for (int r = 0; r < rank; ++r)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Crm,
                                                                            keep[r]);
             it; ++it)
          ct.emplace_back(r, static_cast<int>(it.col()), it.value());
      SpMat C2(rank, n);
      C2.setFromTriplets(ct.begin(), ct.end());
      Eigen::VectorXd z2(rank);
      for (int r = 0; r < rank; ++r) z2(r) = z(keep[r]);
      return solve_kkt(J, b, C2, z2, rel_residual);
    }
  }
  if (lu.info() != Eigen::Success) throw SolverError("kkt factorization failed");

  if (rel_residual) *rel_residual = rel;
  return y.segment(nr, n);
}

namespace {

template <bool Mhd>
SolveResult solve_loop(const CaseSetup& s, const ContinuationSchedule& sch) {
  SolveResult R;
  Eigen::VectorXd U = freestream_state_vector(s);
  SpMat C;
  Eigen::VectorXd Z;
  int last_damp = 0;
  bool inc_converged = false;

  for (int inc = 1; inc <= sch.num_increments && R.failure.empty(); ++inc) {
    double frac = sch.wall_fraction(inc);
    apply_wall_bc(s, U, frac);
    if constexpr (Mhd) constraint_rows(s, frac, C, Z);
    inc_converged = false;

    for (int it = 1; it <= sch.max_newton_iters; ++it) {
      Eigen::VectorXd Res = Mhd ? assemble_mhd_residual(s, U, frac)
                                : assemble_euler_residual(s, U, frac);
      double l2 = Res.norm();
      double linf = Res.lpNorm<Eigen::Infinity>();
      double maxdiv = 0.0;
      if constexpr (Mhd) maxdiv = (s.divb * U).lpNorm<Eigen::Infinity>();
      if (!std::isfinite(l2)) {
        R.failure = "residual is not finite";
        break;
      }
      R.trace.push_back({inc, it, l2, linf, maxdiv, last_damp});
      last_damp = 0;
      R.final_residual = l2;
      if (sch.verbose)
        std::fprintf(stderr, "  inc %2d it %2d  |res|2 %.3e  |res|inf %.3e%s\n", inc,
                     it, l2, linf, Mhd ? "  (kkt)" : "");
      if (l2 < sch.tol) {
        inc_converged = true;
        break;
      }

      Eigen::VectorXd d;
      if constexpr (Mhd) {
        SpMat J = assemble_jacobian(s, U);
        Eigen::VectorXd b = J * U - Res;
        double rel = 0.0;
        Eigen::VectorXd Unext = solve_kkt(J, b, C, Z, &rel);
        R.worst_kkt_rel = std::max(R.worst_kkt_rel, rel);
        if (rel > 1e-10)
          std::cerr << "warning: kkt relative residual " << rel << "\n";
        d = Unext - U;
      } else {
        SpMat J = assemble_jacobian(s, U);
        LU lu;
        lu.compute(J);
        if (lu.info() != Eigen::Success) {
          R.failure = "jacobian factorization failed";
          break;
        }
        Eigen::VectorXd rhs = -Res;
        d = lu.solve(rhs);
        refine(J, rhs, lu, d);
      }

      double step = 1.0;
      int nd = 0;
      Eigen::VectorXd Utry = U + d;
      while (!states_positive(s, Utry)) {
        if (++nd > sch.max_dampings) break;
        step *= sch.damping;
        Utry = U + step * d;
      }
      if (nd > sch.max_dampings) {
        R.failure = "positivity damping floor reached";
        break;
      }
      U = Utry;
      last_damp = nd;
      if (sch.record_iterates) R.iterates.push_back(U);
    }
  }

  R.U = U;
  R.converged = R.failure.empty() && inc_converged;
  return R;
}

}  // namespace

SolveResult newton_solve_euler(const CaseSetup& setup, const ContinuationSchedule& sch) {
  if (setup.mhd) throw SolverError("setup is mhd");
  return solve_loop<false>(setup, sch);
}

SolveResult newton_solve_mhd(const CaseSetup& setup, const ContinuationSchedule& sch) {
  if (!setup.mhd) throw SolverError("setup is euler");
  return solve_loop<true>(setup, sch);
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path,
                     bool mhd) {
  std::ofstream out(path);
  if (!out) throw SolverError("cannot open " + path);
  out << "increment,iteration,res_l2,res_linf";
  if (mhd) out << ",max_divb";
  out << ",dampings\n";
  out.precision(16);
  for (const auto& t : trace) {
    out << t.increment << "," << t.iteration << "," << t.res_l2 << "," << t.res_linf;
    if (mhd) out << "," << t.max_divb;
    out << "," << t.dampings << "\n";
  }
}

}  // namespace conical
