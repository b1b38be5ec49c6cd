#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "conical/case.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace conical;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const std::string& log = "cli_log.txt") {
  std::string cmd = std::string(CONICAL_BIN) + " " + args + " >" + log + " 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  if (WIFEXITED(rc)) return WEXITSTATUS(rc);
  return -2;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("config parsing defaults and keys") {
  CaseConfig c = parse_config_text("", "empty");
  CHECK(c.system == "euler");
  CHECK(c.mach == 2.0);
  CHECK(c.schedule.num_increments == 20);
  CHECK(c.schedule.tol == 1e-9);
  CHECK(c.write_vtk);

  CaseConfig d = parse_config_text(
      "# comment line\n"
      "system = mhd\n"
      "gamma = 1.4\n"
      "mach = 3.5\n"
      "aoa_deg = 10\n"
      "roll_deg = 15\n"
      "b_dir = perp-up\n"
      "b_mag = 0.2\n"
      "shape = ellipse\n"
      "ellipse_x_deg = 9\n"
      "ellipse_y_deg = 3\n"
      "mesh_w = 24\n"
      "mesh_h = 14\n"
      "outer_phi_deg = 55\n"
      "stretch = 1.05\n"
      "c_visc = 0.4\n"
      "num_increments = 6\n"
      "max_newton_iters = 12\n"
      "tol = 1e-8\n"
      "damping = 0.25\n"
      "cont_schedule = geometric\n"
      "cont_ratio = 0.6\n"
      "output_dir = some_out\n"
      "write_vtk = false\n"
      "write_csv = true\n"
      "verbose = true\n",
      "full");
  CHECK(d.system == "mhd");
  CHECK(d.mach == 3.5);
  CHECK(d.b_dir == "perp-up");
  CHECK(d.b_mag == 0.2);
  CHECK(d.shape == "ellipse");
  CHECK(d.mesh_w == 24);
  CHECK(d.stretch == 1.05);
  CHECK(d.c_visc == 0.4);
  CHECK(d.schedule.num_increments == 6);
  CHECK(d.schedule.max_newton_iters == 12);
  CHECK(d.schedule.tol == 1e-8);
  CHECK(d.schedule.damping == 0.25);
  CHECK(d.schedule.geometric);
  CHECK(d.schedule.geometric_ratio == 0.6);
  CHECK(d.output_dir == "some_out");
  CHECK(!d.write_vtk);
  CHECK(d.verbose);
  CHECK(d.schedule.verbose);
}

TEST_CASE("config errors carry the line number") {
  auto expect_throw = [](const std::string& text, const std::string& needle) {
    try {
      parse_config_text(text, "cfg");
      FAIL_CHECK("expected ConfigError for: " << text);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_throw("mach = fast\n", "cfg:1");
  expect_throw("mach 2\n", "cfg:1");
  expect_throw("\nnot_a_key = 1\n", "not_a_key");
  expect_throw("\nnot_a_key = 1\n", "cfg:2");
  expect_throw("system = magneto\n", "system");
  expect_throw("num_increments = 0\n", "num_increments");
  expect_throw("damping = 1.5\n", "damping");
  expect_throw("cont_schedule = cubic\n", "cont_schedule");
  expect_throw("write_vtk = maybe\n", "boolean");
  expect_throw("mesh_w = 4\n", "mesh_w");
}

TEST_CASE("b_dir euler guard") {
  CaseConfig c = parse_config_text("system = euler\nb_mag = 0.3\nb_dir = stream\n",
                                   "cfg");
  QuadMesh m;
  CellFrames f;
  CaseSetup s;
  CHECK_THROWS_AS(build_case(c, m, f, s), ConfigError);
}

TEST_CASE("cli solve exit codes") {
  CHECK(run("solve no_such_config.cfg") == 3);

  write_file("bad.cfg", "mach = 0.5\n");
  CHECK(run("solve bad.cfg") == 3);  // subsonic free stream is rejected
  CHECK(slurp("cli_log.txt").find("supersonic") != std::string::npos);

  write_file("badkey.cfg", "spice = 1\n");
  CHECK(run("solve badkey.cfg") == 3);
}

TEST_CASE("cli mesh-gen then solve") {
  fs::remove_all("cli_case");
  CHECK(run("mesh-gen --shape circle --half-angle 10 -W 16 -H 10 "
            "-o cli_mesh.txt") == 0);
  QuadMesh m = load_mesh("cli_mesh.txt");
  CHECK(m.W == 16);
  CHECK(m.H == 10);

  write_file("cli_case.cfg",
             "mesh_file = cli_mesh.txt\n"
             "mach = 2\n"
             "aoa_deg = 5\n"
             "num_increments = 8\n"
             "output_dir = cli_case\n");
  CHECK(run("solve cli_case.cfg") == 0);
  CHECK(fs::exists("cli_case/trace.csv"));
  CHECK(fs::exists("cli_case/report.md"));
  CHECK(fs::exists("cli_case/solution.vtk"));
  CHECK(fs::exists("cli_case/fields.csv"));

  std::string trace = slurp("cli_case/trace.csv");
  CHECK(trace.rfind("increment,iteration,res_l2,res_linf,dampings", 0) == 0);
  std::string vtk = slurp("cli_case/solution.vtk");
  CHECK(vtk.rfind("# vtk DataFile", 0) == 0);
  CHECK(vtk.find("CELL_DATA") != std::string::npos);
  CHECK(vtk.find("VECTORS crossflow_velocity") != std::string::npos);
  CHECK(vtk.find("SCALARS crossflow_mach") != std::string::npos);

  // surface profile: header plus one row per azimuth column
  std::istringstream surf(slurp("cli_case/surface.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(surf, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 16 + 1);
}

TEST_CASE("emitted cartesian velocity maps back to the stored components") {
  // uses the artifacts of the previous case
  REQUIRE(fs::exists("cli_case/solution.vtk"));
  QuadMesh m = load_mesh("cli_mesh.txt");
  CellFrames F = build_cell_frames(m);
  int N = m.W * m.H;

  std::istringstream vtk(slurp("cli_case/solution.vtk"));
  std::string line;
  std::vector<Eigen::Vector3d> cart;
  while (std::getline(vtk, line))
    if (line.rfind("VECTORS velocity", 0) == 0) break;
  for (int i = 0; i < N; ++i) {
    REQUIRE(std::getline(vtk, line));
    std::istringstream ss(line);
    Eigen::Vector3d v;
    ss >> v(0) >> v(1) >> v(2);
    cart.push_back(v);
  }

  std::istringstream csv(slurp("cli_case/fields.csv"));
  std::getline(csv, line);  // header
  double worst = 0.0;
  for (int i = 0; i < N; ++i) {
    REQUIRE(std::getline(csv, line));
    for (auto& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ss(line);
    double cell, row, col, x, y, z, th, ph, rho, v1, v2, v3;
    ss >> cell >> row >> col >> x >> y >> z >> th >> ph >> rho >> v1 >> v2 >> v3;
    Eigen::Vector3d back = F.cell[i].J_inv * cart[i];
    worst = std::max(worst,
                     (back - Eigen::Vector3d(v1, v2, v3)).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("solve outputs are deterministic") {
  for (const char* dir : {"cli_det1", "cli_det2"}) {
    fs::remove_all(dir);
    write_file("cli_det.cfg",
               std::string("mesh_file = cli_mesh.txt\nmach = 2\naoa_deg = 5\n"
                           "num_increments = 8\noutput_dir = ") +
                   dir + "\n");
    CHECK(run("solve cli_det.cfg") == 0);
  }
  for (const char* name :
       {"solution.vtk", "fields.csv", "surface.csv", "trace.csv", "report.md"})
    CHECK(slurp(std::string("cli_det1/") + name) ==
          slurp(std::string("cli_det2/") + name));
}

TEST_CASE("cli reports non-convergence with exit 2") {
  write_file("cli_stall.cfg",
             "mesh_w = 16\nmesh_h = 10\nhalf_angle_deg = 10\nmach = 2\n"
             "num_increments = 1\nmax_newton_iters = 1\ntol = 1e-16\n"
             "output_dir = cli_stall\n");
  CHECK(run("solve cli_stall.cfg") == 2);
  CHECK(fs::exists("cli_stall/trace.csv"));  // trace still written
}

TEST_CASE("cli demo-central") {
  CHECK(run("demo-central burgers-flat", "demo1.txt") == 0);
  std::string out = slurp("demo1.txt");
  CHECK(out.find("bitwise equal") != std::string::npos);

  CHECK(run("demo-central ring-advection --cells 64", "demo2.txt") == 0);
  std::string ring = slurp("demo2.txt");
  CHECK(ring.find("L1") != std::string::npos);

  CHECK(run("demo-central no_such_demo", "demo3.txt") == 3);
}

TEST_CASE("cli validate rejects bad table lists") {
  CHECK(run("validate --tables t9") == 3);
  CHECK(run("validate --tables nope") == 3);
}

TEST_CASE("cli validate with no tables writes an empty report") {
  CHECK(run("validate --tables none -o cli_empty_report.md") == 0);
  std::string report = slurp("cli_empty_report.md");
  CHECK(report.find("validation") != std::string::npos);
  CHECK(report.find("## Table") == std::string::npos);
}

TEST_CASE("cli requires a subcommand") { CHECK(run("") != 0); }
