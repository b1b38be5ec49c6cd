#include "conical/discretization.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <thread>

namespace conical {

StencilBank build_stencil_bank(double c_visc) {
  if (!(c_visc >= 0.0)) throw DiscretizationError("c_visc must be >= 0");
  StencilBank b;
  b.c_visc = c_visc;
  b.interior_d1 = make_stencil({{-2, 1.0 / 12.0},
                                {-1, -2.0 / 3.0},
                                {1, 2.0 / 3.0},
                                {2, -1.0 / 12.0}});
  b.interior_d2 = b.interior_d1;
  b.near_top_d2 = make_stencil({{-2, 1.0 / 6.0},
                                {-1, -1.0},
                                {0, 1.0 / 2.0},
                                {1, 1.0 / 3.0}});
  b.near_bottom_d2 = make_stencil({{-1, -1.0 / 3.0},
                                   {0, -1.0 / 2.0},
                                   {1, 1.0},
                                   {2, -1.0 / 6.0}});
  b.bottom_d2 = make_stencil({{0, -3.0 / 2.0}, {1, 2.0}, {2, -1.0 / 2.0}});
  b.visc1 = make_stencil({{-1, -c_visc}, {0, 2.0 * c_visc}, {1, -c_visc}});
  b.visc2 = b.visc1;
  b.bottom_visc2 = make_stencil({{0, c_visc}, {1, -c_visc}});
  return b;
}

int thread_count() {
  static const int n = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    const char* env = std::getenv("CONICAL_THREADS");
    if (env) {
      char* end = nullptr;
      long v = std::strtol(env, &end, 10);
      if (end && *end == '\0' && v >= 1) return static_cast<int>(std::min<long>(v, hw));
    }
    return hw;
  }();
  return n;
}

namespace {

void parallel_for(int n, const std::function<void(int, int)>& body) {
  int workers = thread_count();
  if (workers > n) workers = n;
  if (workers <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  int chunk = (n + workers - 1) / workers;
  for (int t = 1; t < workers; ++t) {
    int lo = t * chunk;
    int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(body, lo, hi);
  }
  body(0, std::min(n, chunk));
  for (auto& th : pool) th.join();
}

std::vector<CdEntry> fold_stencil(const CellFrames& frames, int cell,
                                  const Stencil& st, int direction) {
  std::vector<CdEntry> out;
  out.reserve(st.entries.size());
  const Mat3& Jc_inv = frames.cell[cell].J_inv;
  for (const auto& e : st.entries) {
    int o = offset_cell(frames, cell, direction, e.offset);
    out.push_back({o, e.coeff, Jc_inv * frames.cell[o].J});
  }
  return out;
}

const Stencil& d2_for_row(const StencilBank& b, int r, int H) {
  if (r == 0) return b.bottom_d2;
  if (r == 1) return b.near_bottom_d2;
  if (r == H - 2) return b.near_top_d2;
  return b.interior_d2;
}

}  // namespace

CaseSetup make_case_setup(const CellFrames& frames, const GasModel& gas,
                          const FreeStream& fs, bool mhd, const StencilBank& bank) {
  validate_gas(gas);
  validate_freestream(gas, fs);
  CaseSetup s;
  s.frames = &frames;
  s.bank = bank;
  s.gas = gas;
  s.fs = fs;
  s.mhd = mhd;
  s.e_fs = freestream_energy(gas, fs.mach);
  s.rho_fs = 1.0;

  int N = frames.cells();
  int W = frames.W, H = frames.H;
  if (H < 4) throw DiscretizationError("need at least 4 rows");
  s.v_fs.resize(N);
  s.b_fs.resize(N);
  Vec3 vt = freestream_velocity(fs);
  for (int i = 0; i < N; ++i) {
    s.v_fs[i] = frames.cell[i].J_inv * vt;
    s.b_fs[i] = frames.cell[i].J_inv * fs.b_cartesian;
  }

  s.cd1.resize(N);
  s.cd2.resize(N);
  s.visc.resize(N);
  for (int i = 0; i < N; ++i) {
    int r = frames.row(i);
    if (r == H - 1) continue;  // Dirichlet row, no operator needed
    s.cd1[i] = fold_stencil(frames, i, bank.interior_d1, 1);
    s.cd2[i] = fold_stencil(frames, i, d2_for_row(bank, r, H), 2);
    s.visc[i] = fold_stencil(frames, i, bank.visc1, 1);
    auto v2 = fold_stencil(frames, i, r == 0 ? bank.bottom_visc2 : bank.visc2, 2);
    s.visc[i].insert(s.visc[i].end(), v2.begin(), v2.end());
  }

  if (mhd) {
    int nv = s.nvars();
    int m = W * (H - 1);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(m) * 24);
    for (int i = 0; i < m; ++i) {
      for (int dir = 0; dir < 2; ++dir) {
        const auto& tab = dir == 0 ? s.cd1[i] : s.cd2[i];
        for (const auto& e : tab) {
          for (int k = 0; k < 3; ++k) {
            double v = e.coeff * e.K(dir, k);
            if (v != 0.0) trips.emplace_back(i, e.cell * nv + 5 + k, v);
          }
        }
      }
    }
    s.divb.resize(m, nv * N);
    s.divb.setFromTriplets(trips.begin(), trips.end());
  }
  return s;
}

Eigen::VectorXd freestream_state_vector(const CaseSetup& s) {
  int nv = s.nvars();
  int N = s.frames->cells();
  Eigen::VectorXd U(nv * N);
  for (int i = 0; i < N; ++i) {
    double* u = U.data() + i * nv;
    u[0] = s.rho_fs;
    u[1] = s.v_fs[i](0);
    u[2] = s.v_fs[i](1);
    u[3] = s.v_fs[i](2);
    u[4] = s.e_fs;
    if (s.mhd) {
      u[5] = s.b_fs[i](0);
      u[6] = s.b_fs[i](1);
      u[7] = s.b_fs[i](2);
    }
  }
  return U;
}

void apply_wall_bc(const CaseSetup& s, Eigen::VectorXd& U, double fraction) {
  int nv = s.nvars();
  for (int i = 0; i < s.frames->W; ++i) {
    U(i * nv + 2) = fraction * s.v_fs[i](1);
    if (s.mhd) U(i * nv + 6) = fraction * s.b_fs[i](1);
  }
}

namespace {

struct CellFluxes {
  Vec3 mass;
  Mat3 mom;
  Vec3 energy;
  Mat3 induction;
};

EulerState read_euler(const Eigen::VectorXd& U, int i, int nv) {
  const double* u = U.data() + i * nv;
  return {u[0], Vec3(u[1], u[2], u[3]), u[4]};
}

MHDState read_mhd(const Eigen::VectorXd& U, int i, int nv) {
  const double* u = U.data() + i * nv;
  return {u[0], Vec3(u[1], u[2], u[3]), u[4], Vec3(u[5], u[6], u[7])};
}

template <bool Mhd>
Eigen::VectorXd assemble_residual_impl(const CaseSetup& s, const Eigen::VectorXd& U,
                                       double frac) {
  const CellFrames& F = *s.frames;
  int nv = s.nvars();
  int N = F.cells();
  if (U.size() != nv * N) throw DiscretizationError("state size mismatch");

  std::vector<CellFluxes> fx(N);
  parallel_for(N, [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      if constexpr (Mhd) {
        MHDState q = read_mhd(U, i, nv);
        MHDFluxes f = mhd_fluxes(s.gas, q, F.cell[i]);
        fx[i] = {f.mass, f.mom, f.energy, f.induction};
      } else {
        EulerState q = read_euler(U, i, nv);
        EulerFluxes f = euler_fluxes(s.gas, q, F.cell[i]);
        fx[i] = {f.mass, f.mom, f.energy, Mat3::Zero()};
      }
    }
  });

  Eigen::VectorXd R(nv * N);
  parallel_for(N, [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      double* r = R.data() + i * nv;
      int row = F.row(i);
      if (row == F.H - 1) {
        const double* u = U.data() + i * nv;
        r[0] = u[0] - s.rho_fs;
        r[1] = u[1] - s.v_fs[i](0);
        r[2] = u[2] - s.v_fs[i](1);
        r[3] = u[3] - s.v_fs[i](2);
        r[4] = u[4] - s.e_fs;
        if constexpr (Mhd) {
          r[5] = u[5] - s.b_fs[i](0);
          r[6] = u[6] - s.b_fs[i](1);
          r[7] = u[7] - s.b_fs[i](2);
        }
        continue;
      }

      double mass = 0.0, energy = 0.0, div = 0.0;
      Vec3 mom = Vec3::Zero(), ind = Vec3::Zero();
      for (int dir = 0; dir < 2; ++dir) {
        const auto& tab = dir == 0 ? s.cd1[i] : s.cd2[i];
        for (const auto& e : tab) {
          const CellFluxes& f = fx[e.cell];
          mass += e.coeff * (e.K.row(dir) * f.mass)(0);
          energy += e.coeff * (e.K.row(dir) * f.energy)(0);
          Vec3 w = f.mom * e.K.row(dir).transpose();
          mom += e.coeff * (e.K * w);
          if constexpr (Mhd) {
            Vec3 wb = f.induction * e.K.row(dir).transpose();
            ind += e.coeff * (e.K * wb);
            const double* u = U.data() + e.cell * nv;
            div += e.coeff * (e.K(dir, 0) * u[5] + e.K(dir, 1) * u[6] +
                              e.K(dir, 2) * u[7]);
          }
        }
      }
      for (const auto& e : s.visc[i]) {
        const double* u = U.data() + e.cell * nv;
        mass += e.coeff * u[0];
        energy += e.coeff * u[4];
        mom += e.coeff * (e.K * Vec3(u[1], u[2], u[3]));
        if constexpr (Mhd) ind += e.coeff * (e.K * Vec3(u[5], u[6], u[7]));
      }

      r[0] = mass;
      r[1] = mom(0);
      r[2] = mom(1);
      r[3] = mom(2);
      r[4] = energy;
      if constexpr (Mhd) {
        MHDState q = read_mhd(U, i, nv);
        PowellCoeff pc = powell_coefficients(q, F.cell[i].G);
        for (int k = 0; k < 3; ++k) r[1 + k] += pc.c(1 + k) * div;
        r[4] += pc.c(4) * div;
        r[5] = ind(0) + pc.c(5) * div;
        r[6] = ind(1) + pc.c(6) * div;
        r[7] = ind(2) + pc.c(7) * div;
      }
      if (row == 0) {
        r[2] = U(i * nv + 2) - frac * s.v_fs[i](1);
        if constexpr (Mhd) r[6] = U(i * nv + 6) - frac * s.b_fs[i](1);
      }
    }
  });
  return R;
}

template <bool Mhd, class JacVec>
void jacobian_rows(const CaseSetup& s, const Eigen::VectorXd& U, int i,
                   const JacVec& jac, std::vector<Eigen::Triplet<double>>& out) {
  const CellFrames& F = *s.frames;
  int nv = s.nvars();
  int base = i * nv;
  int row = F.row(i);

  if (row == F.H - 1) {
    for (int k = 0; k < nv; ++k) out.emplace_back(base + k, base + k, 1.0);
    return;
  }
  bool pinned[8] = {false, false, row == 0, false, false, false,
                    Mhd && row == 0, false};

  // flux terms
  for (int dir = 0; dir < 2; ++dir) {
    const auto& tab = dir == 0 ? s.cd1[i] : s.cd2[i];
    for (const auto& e : tab) {
      int cb = e.cell * nv;
      const auto& fj = jac[e.cell];

      auto rv = (e.coeff * (e.K.row(dir) * fj.mass)).eval();
      for (int m = 0; m < nv; ++m)
        if (rv(m) != 0.0) out.emplace_back(base + 0, cb + m, rv(m));
      rv = e.coeff * (e.K.row(dir) * fj.energy);
      for (int m = 0; m < nv; ++m)
        if (rv(m) != 0.0) out.emplace_back(base + 4, cb + m, rv(m));

      for (int m = 0; m < nv; ++m) {
        Mat3 A;
        for (int k = 0; k < 3; ++k)
          for (int j = 0; j < 3; ++j) A(k, j) = fj.mom(3 * k + j, m);
        Vec3 w = A * e.K.row(dir).transpose();
        Vec3 col = e.coeff * (e.K * w);
        for (int k = 0; k < 3; ++k)
          if (!pinned[1 + k] && col(k) != 0.0)
            out.emplace_back(base + 1 + k, cb + m, col(k));
        if constexpr (Mhd) {
          for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 3; ++j) A(k, j) = fj.induction(3 * k + j, m);
          w = A * e.K.row(dir).transpose();
          col = e.coeff * (e.K * w);
          for (int k = 0; k < 3; ++k)
            if (!pinned[5 + k] && col(k) != 0.0)
              out.emplace_back(base + 5 + k, cb + m, col(k));
        }
      }
    }
  }

  // dissipation terms
  for (const auto& e : s.visc[i]) {
    int cb = e.cell * nv;
    out.emplace_back(base + 0, cb + 0, e.coeff);
    out.emplace_back(base + 4, cb + 4, e.coeff);
    for (int k = 0; k < 3; ++k)
      for (int m = 0; m < 3; ++m) {
        double v = e.coeff * e.K(k, m);
        if (v == 0.0) continue;
        if (!pinned[1 + k]) out.emplace_back(base + 1 + k, cb + 1 + m, v);
        if (Mhd && !pinned[5 + k]) out.emplace_back(base + 5 + k, cb + 5 + m, v);
      }
  }

  if constexpr (Mhd) {
    // Powell product: d(c * div) = dc * div + c * d(div)
    MHDState q = read_mhd(U, i, nv);
    PowellCoeff pc = powell_coefficients(q, F.cell[i].G);
    double div = 0.0;
    for (int dir = 0; dir < 2; ++dir) {
      const auto& tab = dir == 0 ? s.cd1[i] : s.cd2[i];
      for (const auto& e : tab) {
        const double* u = U.data() + e.cell * nv;
        div += e.coeff * (e.K(dir, 0) * u[5] + e.K(dir, 1) * u[6] +
                          e.K(dir, 2) * u[7]);
      }
    }
    if (div != 0.0)
      for (int r = 1; r < 8; ++r) {
        if (pinned[r]) continue;
        for (int qv = 0; qv < 8; ++qv)
          if (pc.dc(r, qv) != 0.0)
            out.emplace_back(base + r, base + qv, pc.dc(r, qv) * div);
      }
    for (int dir = 0; dir < 2; ++dir) {
      const auto& tab = dir == 0 ? s.cd1[i] : s.cd2[i];
      for (const auto& e : tab) {
        for (int m = 0; m < 3; ++m) {
          double dd = e.coeff * e.K(dir, m);
          if (dd == 0.0) continue;
          for (int r = 1; r < 8; ++r)
            if (!pinned[r] && pc.c(r) != 0.0)
              out.emplace_back(base + r, e.cell * nv + 5 + m, pc.c(r) * dd);
        }
      }
    }
  }

  if (row == 0) {
    out.emplace_back(base + 2, base + 2, 1.0);
    if (Mhd) out.emplace_back(base + 6, base + 6, 1.0);
  }
}

}  // namespace

Eigen::VectorXd assemble_euler_residual(const CaseSetup& s, const Eigen::VectorXd& U,
                                        double wall_fraction) {
  if (s.mhd) throw DiscretizationError("setup is mhd");
  return assemble_residual_impl<false>(s, U, wall_fraction);
}

Eigen::VectorXd assemble_mhd_residual(const CaseSetup& s, const Eigen::VectorXd& U,
                                      double wall_fraction) {
  if (!s.mhd) throw DiscretizationError("setup is euler");
  return assemble_residual_impl<true>(s, U, wall_fraction);
}

SpMat assemble_jacobian(const CaseSetup& s, const Eigen::VectorXd& U) {
  const CellFrames& F = *s.frames;
  int nv = s.nvars();
  int N = F.cells();
  if (U.size() != nv * N) throw DiscretizationError("state size mismatch");

  std::vector<EulerFluxJac> jeu;
  std::vector<MHDFluxJac> jmh;
  if (s.mhd)
    jmh.resize(N);
  else
    jeu.resize(N);
  parallel_for(N, [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      if (s.mhd)
        jmh[i] = mhd_flux_jacobians(s.gas, read_mhd(U, i, nv), F.cell[i]);
      else
        jeu[i] = euler_flux_jacobians(s.gas, read_euler(U, i, nv), F.cell[i]);
    }
  });

  int workers = thread_count();
  int chunk = (N + workers - 1) / workers;
  int nchunks = (N + chunk - 1) / chunk;
  std::vector<std::vector<Eigen::Triplet<double>>> parts(nchunks);
  parallel_for(nchunks, [&](int clo, int chi) {
    for (int c = clo; c < chi; ++c) {
      int lo = c * chunk, hi = std::min(N, lo + chunk);
      auto& out = parts[c];
      out.reserve(static_cast<size_t>(hi - lo) * nv * (s.mhd ? 60 : 45));
      for (int i = lo; i < hi; ++i) {
        if (s.mhd)
          jacobian_rows<true>(s, U, i, jmh, out);
        else
          jacobian_rows<false>(s, U, i, jeu, out);
      }
    }
  });

  std::vector<Eigen::Triplet<double>> trips;
  size_t total = 0;
  for (auto& p : parts) total += p.size();
  trips.reserve(total);
  for (auto& p : parts) trips.insert(trips.end(), p.begin(), p.end());

  SpMat J(nv * N, nv * N);
  J.setFromTriplets(trips.begin(), trips.end());
  J.makeCompressed();
  return J;
}

ResidualSystem assemble_system(const CaseSetup& s, const Eigen::VectorXd& U,
                               double wall_fraction, bool with_jacobian) {
  ResidualSystem sys;
  sys.residual = s.mhd ? assemble_mhd_residual(s, U, wall_fraction)
                       : assemble_euler_residual(s, U, wall_fraction);
  if (with_jacobian) sys.jacobian = assemble_jacobian(s, U);
  sys.divB = s.divb;
  sys.c_visc = s.bank.c_visc;
  return sys;
}

void constraint_rows(const CaseSetup& s, double wall_fraction, SpMat& C,
                     Eigen::VectorXd& Z) {
  if (!s.mhd) throw DiscretizationError("constraint rows are an mhd feature");
  const CellFrames& F = *s.frames;
  int nv = s.nvars();
  int W = F.W, H = F.H;
  int mdiv = W * (H - 1);
  int m = mdiv + W * nv + 2 * W;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(s.divb.nonZeros() + W * nv + 2 * W);
  Z = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < s.divb.outerSize(); ++k)
    for (SpMat::InnerIterator it(s.divb, k); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                         it.value());

  int r = mdiv;
  for (int c = 0; c < W; ++c) {
    int i = (H - 1) * W + c;
    trips.emplace_back(r + 0, i * nv + 0, 1.0);
    Z(r + 0) = s.rho_fs;
    for (int k = 0; k < 3; ++k) {
      trips.emplace_back(r + 1 + k, i * nv + 1 + k, 1.0);
      Z(r + 1 + k) = s.v_fs[i](k);
      trips.emplace_back(r + 5 + k, i * nv + 5 + k, 1.0);
      Z(r + 5 + k) = s.b_fs[i](k);
    }
    trips.emplace_back(r + 4, i * nv + 4, 1.0);
    Z(r + 4) = s.e_fs;
    r += nv;
  }
  for (int i = 0; i < W; ++i) {
    trips.emplace_back(r, i * nv + 2, 1.0);
    Z(r) = wall_fraction * s.v_fs[i](1);
    ++r;
    trips.emplace_back(r, i * nv + 6, 1.0);
    Z(r) = wall_fraction * s.b_fs[i](1);
    ++r;
  }

  C.resize(m, nv * F.cells());
  C.setFromTriplets(trips.begin(), trips.end());
  C.makeCompressed();
}

void write_sparse_triplets(const SpMat& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DiscretizationError("cannot open " + path);
  out << std::setprecision(17);
  out << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      out << it.row() << " " << it.col() << " " << it.value() << "\n";
}

}  // namespace conical
