#include "conical/mesh.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace conical {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::string cell_label(const QuadMesh& m, int i) {
  std::ostringstream os;
  os << "cell " << i << " (row " << m.row(i) << ", col " << m.col(i) << ")";
  return os.str();
}
}  // namespace

int CellFrames::neighbor(int i, int dc, int dr) const {
  int r = row(i) + dr;
  if (periodic2) {
    r %= H;
    if (r < 0) r += H;
  } else if (r < 0 || r >= H) {
    return -1;
  }
  int c = col(i) + dc;
  if (periodic) {
    c %= W;
    if (c < 0) c += W;
  } else if (c < 0 || c >= W) {
    return -1;
  }
  return r * W + c;
}

std::pair<double, double> project_to_sphere(double x, double y) {
  const double r2 = x * x + y * y;
  if (r2 > 1.0 + 1e-12)
    throw std::domain_error("project_to_sphere: point outside the unit disk");
  const double phi = std::asin(std::min(1.0, std::sqrt(r2)));
  double theta;
  if (y == 0.0) {
    // signed limits of arctan(x/y) as y -> 0+
    theta = (x >= 0.0) ? 0.5 * kPi : -1.5 * kPi;
  } else {
    theta = std::atan(x / y);
    if (x < 0.0) theta -= kPi;
  }
  return {theta, phi};
}

double chart_theta(double x, double y) {
  double t = 0.5 * kPi - std::atan2(y, x);
  if (t > 0.5 * kPi) t -= 2.0 * kPi;
  return t;
}

CellBasis cell_basis(double xi1, double xi2) {
  CellBasis cb;
  cb.b = {xi1 * (1.0 - xi2), xi1 * xi2, (1.0 - xi1) * xi2, (1.0 - xi1) * (1.0 - xi2)};
  cb.d1 = {1.0 - xi2, xi2, -xi2, -(1.0 - xi2)};
  cb.d2 = {-xi1, xi1, 1.0 - xi1, -(1.0 - xi1)};
  return cb;
}

Mat3 jacobian_x_theta(double theta, double phi) {
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  Mat3 J;
  J << ct * sp,  st * cp, st * sp,
       -st * sp, ct * cp, ct * sp,
       0.0,      -sp,     cp;
  return J;
}

CellFrames build_cell_frames(const QuadMesh& mesh) {
  CellFrames F;
  F.W = mesh.W;
  F.H = mesh.H;
  F.periodic = mesh.periodic_seam;
  F.cell.resize(mesh.cells());
  const CellBasis ctr = cell_basis(0.5, 0.5);
  for (int i = 0; i < mesh.cells(); ++i) {
    CellFrame& f = F.cell[i];
    for (int k = 0; k < 4; ++k) {
      const double x = mesh.corners[i][k].x();
      const double y = mesh.corners[i][k].y();
      const double r2 = x * x + y * y;
      if (r2 > 1.0 + 1e-12)
        throw MeshError(cell_label(mesh, i) + ": corner outside the unit disk");
      f.phi[k] = std::asin(std::min(1.0, std::sqrt(r2)));
      f.theta[k] = chart_theta(x, y);
    }
    // unwrap azimuths to within pi of corner 0 (heals the seam)
    for (int k = 1; k < 4; ++k)
      f.theta[k] -= 2.0 * kPi * std::round((f.theta[k] - f.theta[0]) / (2.0 * kPi));

    double tc = 0, pc = 0, t1 = 0, t2 = 0, p1 = 0, p2 = 0;
    for (int k = 0; k < 4; ++k) {
      tc += ctr.b[k] * f.theta[k];
      pc += ctr.b[k] * f.phi[k];
      t1 += ctr.d1[k] * f.theta[k];
      t2 += ctr.d2[k] * f.theta[k];
      p1 += ctr.d1[k] * f.phi[k];
      p2 += ctr.d2[k] * f.phi[k];
    }
    Mat3 Jt;
    Jt << t1, t2, 0.0,
          p1, p2, 0.0,
          0.0, 0.0, 1.0;
    f.J = jacobian_x_theta(tc, pc) * Jt;
    if (std::abs(f.J.determinant()) < 1e-12)
      throw MeshError("singular jacobian at " + cell_label(mesh, i));
    f.J_inv = f.J.inverse();
    f.G = f.J.transpose() * f.J;
    f.G_inv = f.J_inv * f.J_inv.transpose();
    f.center = Vec3(std::sin(tc) * std::sin(pc), std::cos(tc) * std::sin(pc), std::cos(pc));
  }
  return F;
}

QuadMesh generate_cone_mesh(const std::function<double(double)>& body_radius,
                            int W, int H, double outer_phi, double stretch) {
  if (W < 8 || H < 4) throw MeshError("mesh must be at least 8 x 4");
  if (!(outer_phi > 0.0) || !(outer_phi < 0.5 * kPi))
    throw MeshError("outer_phi must lie in (0, pi/2)");
  if (!(stretch > 0.0)) throw MeshError("stretch must be positive");

  const double rtop = std::sin(outer_phi);
  std::vector<double> th(W), phib(W);
  for (int c = 0; c < W; ++c) {
    th[c] = -1.5 * kPi + 2.0 * kPi * c / W;
    const double rb = body_radius(th[c]);
    if (!(rb > 0.0))
      throw MeshError("body radius must be positive (azimuth " + std::to_string(th[c]) + ")");
    if (!(rb < rtop))
      throw MeshError("body curve reaches the outer boundary (azimuth " +
                      std::to_string(th[c]) + ")");
    phib[c] = std::asin(rb);
  }

  // shared node table, azimuth index mod W so the seam is bitwise closed
  std::vector<std::vector<Eigen::Vector2d>> node(H + 1, std::vector<Eigen::Vector2d>(W));
  const double den = std::pow(stretch, H) - 1.0;
  for (int r = 0; r <= H; ++r) {
    const double t = (stretch == 1.0) ? double(r) / H : (std::pow(stretch, r) - 1.0) / den;
    for (int c = 0; c < W; ++c) {
      const double ph = phib[c] + t * (outer_phi - phib[c]);
      node[r][c] = Eigen::Vector2d(std::sin(th[c]), std::cos(th[c])) * std::sin(ph);
    }
  }

  QuadMesh m;
  m.W = W;
  m.H = H;
  m.corners.resize(W * H);
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c) {
      const int i = r * W + c;
      const int cp = (c + 1) % W;
      m.corners[i][0] = node[r][cp];
      m.corners[i][1] = node[r + 1][cp];
      m.corners[i][2] = node[r + 1][c];
      m.corners[i][3] = node[r][c];
    }
  return m;
}

std::function<double(double)> circle_body(double half_angle) {
  const double r = std::sin(half_angle);
  return [r](double) { return r; };
}

std::function<double(double)> ellipse_body(double half_angle_x, double half_angle_y) {
  const double rx = std::sin(half_angle_x);
  const double ry = std::sin(half_angle_y);
  return [rx, ry](double a) {
    const double s = std::sin(a), c = std::cos(a);
    return rx * ry / std::sqrt(ry * ry * s * s + rx * rx * c * c);
  };
}

std::function<double(double)> aircraft_body() {
  const double r0 = std::sin(6.0 * kPi / 180.0);
  return [r0](double a) {
    const double s2 = std::sin(a) * std::sin(a);
    const double wings = s2 * s2 * s2;
    const double fin = std::exp(6.0 * (std::cos(a) - 1.0));
    return r0 * (1.0 + 2.8 * wings + 0.8 * fin);
  };
}

namespace {

void validate_mesh(const QuadMesh& m) {
  for (int i = 0; i < m.cells(); ++i)
    for (int k = 0; k < 4; ++k) {
      const auto& p = m.corners[i][k];
      if (p.squaredNorm() > 1.0 + 1e-12)
        throw MeshError(cell_label(m, i) + ": corner outside the unit disk");
    }
  auto same = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a.x() == b.x() && a.y() == b.y();
  };
  for (int i = 0; i < m.cells(); ++i) {
    if (m.col(i) < m.W - 1 || m.periodic_seam) {
      const int j = m.right(i);
      if (!same(m.corners[i][0], m.corners[j][3]) || !same(m.corners[i][1], m.corners[j][2]))
        throw MeshError("cells " + std::to_string(i) + " and " + std::to_string(j) +
                        " do not share their vertical edge bitwise");
    }
    if (m.row(i) < m.H - 1) {
      const int j = i + m.W;
      if (!same(m.corners[i][1], m.corners[j][0]) || !same(m.corners[i][2], m.corners[j][3]))
        throw MeshError("cells " + std::to_string(i) + " and " + std::to_string(j) +
                        " do not share their horizontal edge bitwise");
    }
  }
}

}  // namespace

QuadMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path);
  std::vector<std::pair<std::string, int>> tok;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    const auto h = line.find('#');
    if (h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string t;
    while (ls >> t) tok.emplace_back(t, ln);
  }
  std::size_t p = 0;
  auto need = [&](const std::string& what) -> const std::pair<std::string, int>& {
    if (p >= tok.size())
      throw MeshError(path + ": unexpected end of file, expected " + what);
    return tok[p++];
  };
  auto geti = [&](const std::string& what) {
    const auto& [s, l] = need(what);
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (...) {
      used = 0;
    }
    if (used != s.size())
      throw MeshError(path + ":" + std::to_string(l) + ": expected integer " + what +
                      ", got '" + s + "'");
    return v;
  };
  auto getd = [&](const std::string& what) {
    const auto& [s, l] = need(what);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (...) {
      used = 0;
    }
    if (used != s.size())
      throw MeshError(path + ":" + std::to_string(l) + ": expected number " + what +
                      ", got '" + s + "'");
    return v;
  };

  QuadMesh m;
  m.W = geti("W");
  m.H = geti("H");
  if (m.W < 8 || m.H < 4)
    throw MeshError(path + ": mesh must be at least 8 x 4, got " + std::to_string(m.W) +
                    " x " + std::to_string(m.H));
  m.corners.resize(m.cells());
  for (int i = 0; i < m.cells(); ++i)
    for (int k = 0; k < 4; ++k) {
      const std::string what = "coordinate of cell " + std::to_string(i);
      const double x = getd(what);
      const double y = getd(what);
      m.corners[i][k] = Eigen::Vector2d(x, y);
    }
  if (p != tok.size())
    throw MeshError(path + ":" + std::to_string(tok[p].second) + ": trailing data");
  validate_mesh(m);
  return m;
}

void save_mesh(const QuadMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot open " + path + " for writing");
  out << "# conical quad mesh, cells row-major bottom to top\n";
  out << mesh.W << " " << mesh.H << "\n";
  out << std::setprecision(17);
  for (int i = 0; i < mesh.cells(); ++i) {
    for (int k = 0; k < 4; ++k) {
      if (k) out << " ";
      out << mesh.corners[i][k].x() << " " << mesh.corners[i][k].y();
    }
    out << "\n";
  }
  if (!out) throw MeshError("write failure on " + path);
}

CellFrames make_flat_frames(int W, int H, bool periodic, double dx, double dy) {
  CellFrames F;
  F.W = W;
  F.H = H;
  F.periodic = periodic;
  F.cell.resize(W * H);
  Mat3 J = Mat3::Zero();
  J(0, 0) = dx;
  J(1, 1) = dy;
  J(2, 2) = 1.0;
  for (int i = 0; i < W * H; ++i) {
    CellFrame& f = F.cell[i];
    f.J = J;
    f.J_inv = Mat3::Zero();
    f.J_inv(0, 0) = 1.0 / dx;
    f.J_inv(1, 1) = 1.0 / dy;
    f.J_inv(2, 2) = 1.0;
    f.G = J.transpose() * J;
    f.G_inv = f.J_inv * f.J_inv.transpose();
    f.center = Vec3((F.col(i) + 0.5) * dx, (F.row(i) + 0.5) * dy, 0.0);
  }
  return F;
}

CellFrames make_polar_annulus_frames(int W, int H, double r0, double r1) {
  CellFrames F;
  F.W = W;
  F.H = H;
  F.periodic = true;
  F.cell.resize(W * H);
  const double dpsi = 2.0 * kPi / W;
  const double dr = (r1 - r0) / H;
  for (int i = 0; i < W * H; ++i) {
    CellFrame& f = F.cell[i];
    const double psi = (F.col(i) + 0.5) * dpsi;
    const double r = r0 + (F.row(i) + 0.5) * dr;
    const double s = std::sin(psi), c = std::cos(psi);
    f.J << -r * s * dpsi, c * dr, 0.0,
            r * c * dpsi, s * dr, 0.0,
            0.0,          0.0,    1.0;
    f.J_inv = f.J.inverse();
    f.G = f.J.transpose() * f.J;
    f.G_inv = f.J_inv * f.J_inv.transpose();
    f.center = Vec3(r * c, r * s, 0.0);
  }
  return F;
}

CellFrames make_polar_ring_frames(int N, double R) {
  return make_polar_annulus_frames(N, 1, R - 0.5, R + 0.5);
}

}  // namespace conical
