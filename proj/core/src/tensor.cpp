#include "conical/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace conical {

Stencil make_stencil(std::initializer_list<StencilEntry> entries, int anchor) {
  Stencil s;
  s.entries.assign(entries);
  s.anchor = anchor;
  validate_stencil(s);
  return s;
}

double stencil_coefficient_sum(const Stencil& s) {
  double sum = 0.0;
  for (const auto& e : s.entries) sum += e.coeff;
  return sum;
}

void validate_stencil(const Stencil& s) {
  if (s.entries.empty()) throw TensorError("empty stencil");
  if (std::abs(stencil_coefficient_sum(s)) > 1e-14)
    throw TensorError("stencil coefficients do not sum to zero");
}

DifferencePairs decompose_to_differences(const Stencil& s) {
  validate_stencil(s);
  DifferencePairs out;
  std::vector<StencilEntry> rest;
  std::vector<bool> used(s.entries.size(), false);

  // symmetric pass: opposite coefficients at mirrored offsets
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    if (used[i]) continue;
    const int off = s.entries[i].offset;
    if (off <= s.anchor) continue;  // scan far side only
    const int mirror = 2 * s.anchor - off;
    for (std::size_t j = 0; j < s.entries.size(); ++j) {
      if (used[j] || j == i) continue;
      if (s.entries[j].offset == mirror && s.entries[j].coeff == -s.entries[i].coeff) {
        out.pairs.push_back({s.entries[i].coeff, off, mirror});
        used[i] = used[j] = true;
        break;
      }
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end(), [&](const DiffPair& a, const DiffPair& b) {
    return std::abs(a.plus - s.anchor) < std::abs(b.plus - s.anchor);
  });

  for (std::size_t i = 0; i < s.entries.size(); ++i)
    if (!used[i] && s.entries[i].coeff != 0.0) rest.push_back(s.entries[i]);

  // remainder pairs against its first entry; works since the sum vanishes
  for (std::size_t i = 1; i < rest.size(); ++i)
    out.pairs.push_back({rest[i].coeff, rest[i].offset, rest[0].offset});
  return out;
}

int TensorN::size_of(int rank) {
  int s = 1;
  for (int i = 0; i < rank; ++i) s *= 3;
  return s;
}

TensorN TensorN::zero(int rank) {
  TensorN t;
  t.rank = rank;
  return t;
}

TensorN TensorN::from_vec3(const Vec3& v) {
  TensorN t;
  t.rank = 1;
  for (int i = 0; i < 3; ++i) t.a[i] = v(i);
  return t;
}

TensorN TensorN::from_mat3(const Mat3& m) {
  TensorN t;
  t.rank = 2;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t.a[3 * i + j] = m(i, j);
  return t;
}

Vec3 TensorN::to_vec3() const {
  return Vec3(a[0], a[1], a[2]);
}

Mat3 TensorN::to_mat3() const {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = a[3 * i + j];
  return m;
}

namespace {

TensorN add(const TensorN& x, const TensorN& y) {
  TensorN r = x;
  for (int i = 0; i < x.size(); ++i) r.a[i] += y.a[i];
  return r;
}

TensorN sub(const TensorN& x, const TensorN& y) {
  TensorN r = x;
  for (int i = 0; i < x.size(); ++i) r.a[i] -= y.a[i];
  return r;
}

TensorN scale(const TensorN& x, double w) {
  TensorN r = x;
  for (int i = 0; i < x.size(); ++i) r.a[i] *= w;
  return r;
}

}  // namespace

TensorN apply_slot(const Mat3& M, const TensorN& T, int slot) {
  TensorN R = TensorN::zero(T.rank);
  const int n = T.rank;
  const int sz = T.size();
  const int stride = TensorN::size_of(n - 1 - slot);
  for (int f = 0; f < sz; ++f) {
    const int is = (f / stride) % 3;
    const int base = f - is * stride;
    double v = 0.0;
    for (int k = 0; k < 3; ++k) v += M(is, k) * T.a[base + k * stride];
    R.a[f] = v;
  }
  return R;
}

TensorN apply_all_slots(const Mat3& M, const TensorN& T) {
  TensorN R = T;
  for (int s = 0; s < T.rank; ++s) R = apply_slot(M, R, s);
  return R;
}

CovariantOperator make_covariant_operator(const Stencil& s, int direction, int rank,
                                          const CellFrames& frames) {
  CovariantOperator op;
  op.direction = direction;
  op.rank = rank;
  op.pairs = decompose_to_differences(s);
  op.frames = &frames;
  return op;
}

int offset_cell(const CellFrames& frames, int cell, int direction, int offset) {
  const int j = (direction == 1) ? frames.neighbor(cell, offset, 0)
                                 : frames.neighbor(cell, 0, offset);
  if (j < 0)
    throw TensorError("stencil offset " + std::to_string(offset) + " in direction " +
                      std::to_string(direction) + " leaves the mesh at cell " +
                      std::to_string(cell));
  return j;
}

TensorN covariant_derivative_rankn(const CovariantOperator& op, int cell,
                                   const std::function<TensorN(int)>& u) {
  const CellFrames& F = *op.frames;
  const CellFrame& fc = F.cell[cell];
  TensorN acc;
  bool first = true;
  for (const DiffPair& pr : op.pairs.pairs) {
    const int ip = offset_cell(F, cell, op.direction, pr.plus);
    const int im = offset_cell(F, cell, op.direction, pr.minus);
    const TensorN up = u(ip);
    const TensorN um = u(im);
    if (first) {
      acc = TensorN::zero(up.rank);
      first = false;
    }
    TensorN term = sub(up, um);
    term = add(term, apply_all_slots(fc.J_inv,
                                     sub(apply_all_slots(F.cell[ip].J, up),
                                         apply_all_slots(fc.J, up))));
    term = add(term, apply_all_slots(fc.J_inv,
                                     sub(apply_all_slots(fc.J, um),
                                         apply_all_slots(F.cell[im].J, um))));
    acc = add(acc, scale(term, pr.weight));
  }
  if (first) throw TensorError("covariant operator has no difference pairs");
  return acc;
}

TensorN covariant_derivative_rankn(const CovariantOperator& op, int cell,
                                   const std::vector<TensorN>& u) {
  return covariant_derivative_rankn(op, cell,
                                    std::function<TensorN(int)>([&u](int i) { return u[i]; }));
}

Vec3 covariant_derivative_rank1(const CovariantOperator& op, int cell,
                                const std::vector<Vec3>& u) {
  return covariant_derivative_rankn(
             op, cell, std::function<TensorN(int)>(
                           [&u](int i) { return TensorN::from_vec3(u[i]); }))
      .to_vec3();
}

Mat3 covariant_derivative_rank2(const CovariantOperator& op, int cell,
                                const std::vector<Mat3>& u) {
  return covariant_derivative_rankn(
             op, cell, std::function<TensorN(int)>(
                           [&u](int i) { return TensorN::from_mat3(u[i]); }))
      .to_mat3();
}

TensorN parallel_transport_rankn(const CellFrames& frames, int i, int j, const TensorN& u) {
  const CellFrame& fi = frames.cell[i];
  const CellFrame& fj = frames.cell[j];
  const TensorN d = sub(apply_all_slots(fi.J, u), apply_all_slots(fj.J, u));
  return sub(u, apply_all_slots(fi.J_inv, d));
}

Vec3 parallel_transport_rank1(const CellFrames& frames, int i, int j, const Vec3& u) {
  return parallel_transport_rankn(frames, i, j, TensorN::from_vec3(u)).to_vec3();
}

Mat3 parallel_transport_rank2(const CellFrames& frames, int i, int j, const Mat3& u) {
  return parallel_transport_rankn(frames, i, j, TensorN::from_mat3(u)).to_mat3();
}

Mat3 reference_christoffel(const std::function<Mat3(const Vec3&)>& J, const Vec3& x,
                           int k, double step) {
  Vec3 xp = x, xm = x;
  xp(k) += step;
  xm(k) -= step;
  const Mat3 dJ = (J(xp) - J(xm)) / (2.0 * step);
  return J(x).inverse() * dJ;
}

}  // namespace conical
