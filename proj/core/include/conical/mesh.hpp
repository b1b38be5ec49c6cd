#ifndef CONICAL_MESH_HPP
#define CONICAL_MESH_HPP

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace conical {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Quadrilateral surface mesh, abstractly rectangular W x H. Cells are stored
 * row-major, bottom row first, left to right, and the strip is periodic in
 * the first (azimuthal) index. Corner order is counterclockwise:
 *   corner 0: (xi1,xi2)=(1,0) bottom-right    corner 1: (1,1) top-right
 *   corner 2: (0,1) top-left                  corner 3: (0,0) bottom-left
 * Corners hold planar coordinates (x,y) inside the closed unit disk; the
 * surface point is the unit-sphere point above (x,y). */
struct QuadMesh {
  int W = 0;
  int H = 0;
  bool periodic_seam = true;
  std::vector<std::array<Eigen::Vector2d, 4>> corners;

  int cells() const { return W * H; }
  int row(int i) const { return i / W; }
  int col(int i) const { return i % W; }
  int left(int i) const { return col(i) == 0 ? i + W - 1 : i - 1; }
  int right(int i) const { return col(i) == W - 1 ? i - W + 1 : i + 1; }
};

/* Per-cell frame data. J maps mesh-coordinate components (xi1, xi2, radial)
 * to a fixed Cartesian frame; the radial slot just rides along. */
struct CellFrame {
  std::array<double, 4> theta{};  // unwrapped corner azimuths
  std::array<double, 4> phi{};    // corner polar angles
  Vec3 center = Vec3::Zero();     // representative point, for output only
  Mat3 J = Mat3::Identity();
  Mat3 J_inv = Mat3::Identity();
  Mat3 G = Mat3::Identity();
  Mat3 G_inv = Mat3::Identity();
};

struct CellFrames {
  int W = 0;
  int H = 0;
  bool periodic = true;    // azimuthal wrap
  bool periodic2 = false;  // row wrap, used by flat scheme fixtures only
  std::vector<CellFrame> cell;

  int cells() const { return W * H; }
  int row(int i) const { return i / W; }
  int col(int i) const { return i % W; }
  int left(int i) const { return col(i) == 0 ? i + W - 1 : i - 1; }
  int right(int i) const { return col(i) == W - 1 ? i - W + 1 : i + 1; }
  /* Neighbor at (dc, dr) from cell i; azimuth wraps, returns -1 off the
   * bottom/top of the strip. */
  int neighbor(int i, int dc, int dr) const;
};

/* Map a planar point inside the unit disk to sphere angles (theta, phi).
 * The azimuth branch is
 *   theta = arctan(x/y)           for x >= 0
 *   theta = arctan(x/y) - pi      for x <  0
 * with y -> 0 limits taken as the signed arctan limits, covering
 * theta in (-3pi/2, pi/2]. phi = arcsin(sqrt(x^2+y^2)). Throws
 * std::domain_error outside the closed unit disk. */
std::pair<double, double> project_to_sphere(double x, double y);

/* Seam-continuous azimuth chart used for frame construction; agrees with the
 * branch formula wherever that formula is continuous and has its only jump
 * across the x > 0 semi-axis (theta = pi/2 vs -3pi/2), which the per-cell
 * unwrap removes. */
double chart_theta(double x, double y);

struct CellBasis {
  std::array<double, 4> b{};     // corner weights
  std::array<double, 4> d1{};    // d b_k / d xi1
  std::array<double, 4> d2{};    // d b_k / d xi2
};

/* Bilinear corner basis: b0 = xi1(1-xi2), b1 = xi1 xi2, b2 = (1-xi1) xi2,
 * b3 = (1-xi1)(1-xi2); corner k has b_k = 1. */
CellBasis cell_basis(double xi1, double xi2);

/* d(Cartesian)/d(theta, phi, r) on the unit sphere. Singular at phi = 0. */
Mat3 jacobian_x_theta(double theta, double phi);

/* Build per-cell frames: corner angles from the continuous chart, corner
 * azimuths unwrapped by multiples of 2pi to lie within pi of corner 0, center
 * derivatives from the bilinear basis at (1/2, 1/2), and
 * J = jacobian_x_theta(center) * d(theta,phi,r)/d(xi1,xi2,r).
 * Throws MeshError when a cell's Jacobian is singular (|det| < 1e-12),
 * naming the cell. */
CellFrames build_cell_frames(const QuadMesh& mesh);

/* Generate a conical mesh: W uniform azimuthal columns, H rows geometrically
 * stretched toward the body (stretch = 1 gives uniform rows). body_radius
 * maps azimuth to the planar radius of the body curve; the top row lies on
 * the circle sin(outer_phi). Throws MeshError when the body curve is
 * nonpositive or reaches the outer boundary. */
QuadMesh generate_cone_mesh(const std::function<double(double)>& body_radius,
                            int W, int H, double outer_phi = 1.0471975511965976,
                            double stretch = 1.1);

/* Body curves for generate_cone_mesh. Angles in radians. */
std::function<double(double)> circle_body(double half_angle);
std::function<double(double)> ellipse_body(double half_angle_x, double half_angle_y);
std::function<double(double)> aircraft_body();

/* Text format: comments from '#' to end of line; first two tokens are W H;
 * then W*H records of 8 floats x0 y0 x1 y1 x2 y2 x3 y3 (corner order as in
 * QuadMesh), cells row-major. load_mesh validates shape bounds, the unit
 * disk, and bitwise equality of shared edges; errors carry line numbers. */
QuadMesh load_mesh(const std::string& path);
void save_mesh(const QuadMesh& mesh, const std::string& path);

/* Flat fixture frames: J = diag(dx, dy, 1) in every cell. */
CellFrames make_flat_frames(int W, int H, bool periodic = true,
                            double dx = 1.0, double dy = 1.0);

/* Planar polar annulus fixture: xi1 sweeps the full circle (periodic), xi2
 * spans r in [r0, r1]; J is the exact chart Jacobian at cell centers and the
 * third slot is the out-of-plane direction. */
CellFrames make_polar_annulus_frames(int W, int H, double r0, double r1);

/* One-row ring of radius R for 1-d scheme demos (unit radial spacing). */
CellFrames make_polar_ring_frames(int N, double R);

}  // namespace conical

#endif
