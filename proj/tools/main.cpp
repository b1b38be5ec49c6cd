#include "CLI11.hpp"

#include "conical/case.hpp"
#include "conical/central.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

namespace {

constexpr double kPi = 3.14159265358979323846;

int cmd_solve(const std::string& config_path) {
  try {
    conical::CaseConfig cfg = conical::parse_config(config_path);
    return conical::run_case(cfg);
  } catch (const conical::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 3;
  } catch (const conical::MeshError& e) {
    std::cerr << "invalid mesh: " << e.what() << "\n";
    return 3;
  } catch (const conical::PhysicsError& e) {
    std::cerr << "invalid free stream: " << e.what() << "\n";
    return 3;
  } catch (const conical::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 2;
  }
}

int cmd_validate(const std::vector<std::string>& table_spec, int w, int h,
                 double stretch, const std::string& output, bool verbose) {
  conical::ValidateOptions opt;
  opt.mesh_w = w;
  opt.mesh_h = h;
  opt.stretch = stretch;
  opt.output_path = output;
  opt.verbose = verbose;
  if (!table_spec.empty()) {
    opt.tables.clear();
    for (const auto& raw : table_spec) {
      if (raw.empty() || raw == "none") continue;
      std::string t = raw;
      if (t[0] == 't' || t[0] == 'T') t = t.substr(1);
      try {
        int id = std::stoi(t);
        if (id < 1 || id > 4) throw std::out_of_range(t);
        opt.tables.push_back(id);
      } catch (const std::exception&) {
        std::cerr << "invalid table name '" << raw << "' (use t1..t4)\n";
        return 3;
      }
    }
  }
  return conical::validate_tables(opt);
}

int cmd_mesh_gen(const std::string& shape, double half_angle, double ex, double ey,
                 int w, int h, double outer_phi, double stretch,
                 const std::string& output) {
  try {
    std::function<double(double)> body;
    if (shape == "circle") {
      body = conical::circle_body(half_angle * kPi / 180.0);
    } else if (shape == "ellipse") {
      body = conical::ellipse_body(ex * kPi / 180.0, ey * kPi / 180.0);
    } else if (shape == "aircraft") {
      body = conical::aircraft_body();
    } else {
      std::cerr << "unknown shape '" << shape << "'\n";
      return 3;
    }
    conical::QuadMesh mesh =
        conical::generate_cone_mesh(body, w, h, outer_phi * kPi / 180.0, stretch);
    conical::save_mesh(mesh, output);
    std::cout << "wrote " << w << " x " << h << " mesh to " << output << "\n";
    return 0;
  } catch (const conical::MeshError& e) {
    std::cerr << "mesh generation failed: " << e.what() << "\n";
    return 3;
  }
}

void write_demo_csv(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  out.precision(12);
  for (size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i)
      out << r[i] << (i + 1 < r.size() ? "," : "\n");
  }
}

/* Periodic 1d Burgers on a flat line, run through both the covariant and the
 * plain cartesian path; on flat frames they must agree bit for bit. */
int demo_burgers(int cells, double t_end, double cfl, const std::string& csv) {
  conical::CellFrames frames = conical::make_flat_frames(cells, 1);
  double dx = 2.0 * kPi / cells;

  conical::SchemeProblem prob;
  prob.flux1 = [](const conical::CellFrame&, const conical::Vec3& u) {
    return conical::Vec3(0.5 * u(0) * u(0), 0, 0);
  };
  prob.speed1 = [](const conical::CellFrame&, const conical::Vec3& u) {
    return std::abs(u(0));
  };

  conical::SchemeState cov, cart;
  cov.frames = cart.frames = &frames;
  cov.rank = cart.rank = 0;
  cov.dx = cart.dx = dx;
  cov.u.resize(cells);
  for (int i = 0; i < cells; ++i) {
    double x = (i + 0.5) * dx;
    cov.u[i] = conical::Vec3(0.6 + std::sin(x), 0, 0);
  }
  cart.u = cov.u;

  double t = 0.0;
  int steps = 0;
  while (t < t_end) {
    double smax = 0.0;
    for (const auto& u : cov.u) smax = std::max(smax, std::abs(u(0)));
    double dt = std::min(cfl * dx / std::max(smax, 1e-12), t_end - t);
    conical::step_ssp2(cov, dt, [&](const conical::SchemeState& s) {
      return conical::rhs_1d(s, prob);
    });
    conical::step_ssp2(cart, dt, [&](const conical::SchemeState& s) {
      return conical::rhs_1d_cartesian(s, prob);
    });
    t += dt;
    ++steps;
  }

  double max_diff = 0.0;
  for (int i = 0; i < cells; ++i)
    max_diff = std::max(max_diff, std::abs(cov.u[i](0) - cart.u[i](0)));

  std::cout << "burgers-flat: " << cells << " cells, " << steps << " steps to t="
            << t_end << "\n";
  std::cout << "covariant vs cartesian max difference: " << max_diff
            << (max_diff == 0.0 ? " (bitwise equal)" : "") << "\n";

  if (!csv.empty()) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < cells; ++i)
      rows.push_back({(i + 0.5) * dx, cov.u[i](0)});
    write_demo_csv(csv, {"x", "u"}, rows);
    std::cout << "wrote " << csv << "\n";
  }
  return 0;
}

/* Linear advection of a vector field once around a polar ring; the scheme
 * runs in ring coordinates and is compared against the returned initial
 * condition. */
int demo_ring(int cells, double radius, double cfl, const std::string& csv) {
  conical::CellFrames frames = conical::make_polar_ring_frames(cells, radius);

  conical::SchemeProblem prob;
  prob.flux1 = [](const conical::CellFrame&, const conical::Vec3& u) {
    return conical::Vec3(u);
  };
  prob.speed1 = [](const conical::CellFrame&, const conical::Vec3&) { return 1.0; };

  double dpsi = 2.0 * kPi / cells;
  auto exact_cart = [&](double psi) {
    double g = 1.0 + 0.5 * std::sin(psi);
    return conical::Vec3(g * std::cos(psi), g * std::sin(psi), 0.2 * std::cos(psi));
  };

  conical::SchemeState s;
  s.frames = &frames;
  s.rank = 1;
  s.u.resize(cells);
  for (int i = 0; i < cells; ++i) {
    double psi = (i + 0.5) * dpsi;
    s.u[i] = frames.cell[i].J_inv * exact_cart(psi);
  }

  // unit index-space speed: one full revolution takes t = cells
  double t_end = cells;
  double t = 0.0;
  while (t < t_end) {
    double dt = std::min(cfl, t_end - t);
    conical::step_ssp2(
        s, dt, [&](const conical::SchemeState& st) { return conical::rhs_1d(st, prob); });
    t += dt;
  }

  double l1 = 0.0;
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < cells; ++i) {
    double psi = (i + 0.5) * dpsi;
    conical::Vec3 got = frames.cell[i].J * s.u[i];
    conical::Vec3 want = exact_cart(psi);
    l1 += (got - want).cwiseAbs().sum() / cells;
    rows.push_back({psi, got(0), got(1), got(2), want(0), want(1), want(2)});
  }
  std::cout << "ring-advection: " << cells << " cells, radius " << radius
            << ", one revolution\n";
  std::cout << "L1 error vs transported initial condition: " << l1 << "\n";
  if (!csv.empty()) {
    write_demo_csv(csv, {"psi", "ux", "uy", "uz", "exact_x", "exact_y", "exact_z"},
                   rows);
    std::cout << "wrote " << csv << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady conical Euler / ideal-MHD flow on the unit sphere"};
  app.require_subcommand(1);

  std::string config_path;
  auto* solve = app.add_subcommand("solve", "run a case from a config file");
  solve->add_option("config", config_path, "flat key = value config file")
      ->required();

  std::vector<std::string> table_spec;
  int vw = 40, vh = 60;
  double vstretch = 1.03;
  std::string vout;
  bool vverbose = false;
  auto* validate =
      app.add_subcommand("validate", "compare circular cones against reference data");
  validate->add_option("--tables", table_spec,
                       "subset, e.g. t1,t3; none for an empty report")
      ->delimiter(',');
  validate->add_option("--mesh-w", vw, "azimuthal cells");
  validate->add_option("--mesh-h", vh, "radial rows");
  validate->add_option("--stretch", vstretch, "radial stretching factor");
  validate->add_option("-o,--output", vout, "markdown report path");
  validate->add_flag("--verbose", vverbose, "per-iteration solver output");

  std::string gshape = "circle", gout;
  double ghalf = 10.0, gex = 12.0, gey = 2.0, gouter = 60.0, gstretch = 1.1;
  int gw = 40, gh = 60;
  auto* meshgen = app.add_subcommand("mesh-gen", "generate a cone cross-section mesh");
  meshgen->add_option("--shape", gshape, "circle | ellipse | aircraft");
  meshgen->add_option("--half-angle", ghalf, "circle half angle (deg)");
  meshgen->add_option("--ellipse-x", gex, "ellipse half angle, x axis (deg)");
  meshgen->add_option("--ellipse-y", gey, "ellipse half angle, y axis (deg)");
  meshgen->add_option("-W,--mesh-w", gw, "azimuthal cells");
  meshgen->add_option("-H,--mesh-h", gh, "radial rows");
  meshgen->add_option("--outer-phi", gouter, "outer boundary polar angle (deg)");
  meshgen->add_option("--stretch", gstretch, "radial stretching factor");
  meshgen->add_option("-o,--output", gout, "output mesh file")->required();

  std::string dproblem, dcsv;
  int dcells = 200;
  double dtend = 1.0, dcfl = conical::kDefaultCFL, dradius = 10.0;
  auto* demo = app.add_subcommand("demo-central", "central-scheme demonstrations");
  demo->add_option("problem", dproblem, "burgers-flat | ring-advection")->required();
  demo->add_option("--cells", dcells, "cell count");
  demo->add_option("--t-end", dtend, "end time (burgers)");
  demo->add_option("--radius", dradius, "ring radius (ring-advection)");
  demo->add_option("--cfl", dcfl, "CFL number");
  demo->add_option("--csv", dcsv, "write solution CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(config_path);
    if (validate->parsed())
      return cmd_validate(table_spec, vw, vh, vstretch, vout, vverbose);
    if (meshgen->parsed())
      return cmd_mesh_gen(gshape, ghalf, gex, gey, gw, gh, gouter, gstretch, gout);
    if (demo->parsed()) {
      if (dproblem == "burgers-flat") return demo_burgers(dcells, dtend, dcfl, dcsv);
      if (dproblem == "ring-advection")
        return demo_ring(dcells, dradius, dcfl, dcsv);
      std::cerr << "unknown demo problem '" << dproblem << "'\n";
      return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
