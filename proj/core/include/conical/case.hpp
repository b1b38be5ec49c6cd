#ifndef CONICAL_CASE_HPP
#define CONICAL_CASE_HPP

#include "conical/solver.hpp"

#include <optional>

namespace conical {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* Flat key = value run description; see README for the key list. */
struct CaseConfig {
  std::string system = "euler";  // euler | mhd
  GasModel gas;
  double mach = 2.0;
  double aoa_deg = 0.0;
  double roll_deg = 0.0;
  std::string b_dir = "none";  // none | stream | perp-up | "bx by bz"
  double b_mag = 0.0;

  std::string mesh_file;  // takes precedence over generation parameters
  std::string shape = "circle";  // circle | ellipse | aircraft
  double half_angle_deg = 10.0;
  double ellipse_x_deg = 12.0;
  double ellipse_y_deg = 2.0;
  int mesh_w = 40;
  int mesh_h = 60;
  double outer_phi_deg = 60.0;
  double stretch = 1.1;

  double c_visc = 0.5;
  ContinuationSchedule schedule;
  std::string cont_schedule = "linear";  // linear | geometric

  std::string output_dir = "out";
  bool write_vtk = true;
  bool write_csv = true;
  bool verbose = false;
};

CaseConfig parse_config(const std::string& path);
CaseConfig parse_config_text(const std::string& text, const std::string& label);

/* Build mesh, frames, and setup into caller-owned slots (setup keeps a pointer
 * to frames). */
void build_case(const CaseConfig& cfg, QuadMesh& mesh, CellFrames& frames,
                CaseSetup& setup);

struct SurfaceReport {
  std::vector<double> azimuth;  // wall-row cell center chart angle
  std::vector<double> density_ratio;
  std::vector<double> pressure_ratio;
  std::vector<double> surface_mach;
  std::vector<double> cp;
  double mean_density_ratio = 0.0;
  double mean_pressure_ratio = 0.0;
  double mean_surface_mach = 0.0;
};

SurfaceReport surface_quantities(const CaseSetup& s, const Eigen::VectorXd& U);

struct ShockAngles {
  std::vector<double> radius;  // planar shock radius per column (sin of angle)
  double mean_radius = 0.0;
  double mean_angle = 0.0;  // radians
};

/* Locate the bow shock from the largest interface pressure jump per column,
 * refined by a parabolic fit. The search skips an incidence-scaled band above
 * the body (the surface layer) and the interface next to the outer boundary.
 * Columns whose best jump stays below threshold_frac times the free-stream
 * pressure get radius -1; returns nullopt when every column does. */
std::optional<ShockAngles> extract_shock_angle(const QuadMesh& mesh, const CaseSetup& s,
                                               const Eigen::VectorXd& U,
                                               double threshold_frac = 0.02);

void write_vtk_fields(const QuadMesh& mesh, const CaseSetup& s,
                      const Eigen::VectorXd& U, const std::string& path);
void write_csv_fields(const CaseSetup& s, const Eigen::VectorXd& U,
                      const std::string& path);

/* Full pipeline: solve, write artifacts under cfg.output_dir, return the
 * process exit code (0 ok, 2 no convergence). Invalid configs throw. */
int run_case(const CaseConfig& cfg);

struct ValidateOptions {
  std::vector<int> tables = {1, 2, 3, 4};  // 1 shock, 2 density, 3 pressure, 4 Mach
  int mesh_w = 40;
  int mesh_h = 60;
  double stretch = 1.03;
  std::string output_path;  // markdown report; empty = stdout only
  bool verbose = false;
};

/* Zero-incidence circular cones against published wind-tunnel era reference
 * data. Returns 0 when every converged entry is within tolerance. */
int validate_tables(const ValidateOptions& opt);

}  // namespace conical

#endif
