// cutpatch: convergence, rotation, conditioning and boundary studies for the
// stabilized multipatch Laplace-Beltrami solver.

#include "cutpatch/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace cutpatch;

namespace {

void dump_mesh_stats(const harness::StudyConfig& cfg, const Surface& surface, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  mesh::write_stats_header(out);
  for (int n : cfg.mesh_list())
    for (std::size_t p = 0; p < surface.patches.size(); ++p)
      mesh::write_stats_row(out, static_cast<int>(p), mesh::build_active_mesh(surface.patches[p].domain, {n}));
}

void dump_quadrature(const harness::StudyConfig& cfg, const Surface& surface, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  out.precision(17);
  out << "patch,cell,x1,x2,w\n";
  assembly::Discretization d(surface, cfg.mesh_list().front(), cfg.order);
  for (int p = 0; p < d.num_patches(); ++p) {
    const auto& cells = d.mesh(p).cells();
    for (std::size_t s = 0; s < cells.size(); ++s) {
      std::ostringstream rows;
      rows.precision(17);
      quadrature::write_rule_csv(rows, cells[s].id, d.rule(p, static_cast<int>(s)));
      std::istringstream in(rows.str());
      for (std::string line; std::getline(in, line);) out << p << ',' << line << '\n';
    }
  }
}

void dump_matrix(const harness::StudyConfig& cfg, const harness::ModelProblem& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  assembly::Discretization d(problem.surface, cfg.mesh_list().front(), cfg.order);
  assembly::assemble(d, problem.data, cfg.params()).A.write_triplets(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stabilized cut finite elements on multipatch trimmed surfaces"};
  harness::StudyConfig cfg;
  std::string meshes, gamma, gamma_sweep, config, gnuplot, stats, quad, matrix, trim_file;
  bool check = false, no_timing = false;

  app.add_option("study", cfg.study, "convergence | rotation | condition | boundary")
      ->required()
      ->check(CLI::IsMember({"convergence", "rotation", "condition", "boundary"}));
  app.add_option("--problem", cfg.problem, "sphere | torus | flat2 | flat | cap");
  app.add_option("--order", cfg.order, "polynomial order 1..3");
  app.add_option("--meshes", meshes, "comma separated cells per side, e.g. 8,16,32");
  app.add_option("--beta", cfg.beta, "Nitsche penalty");
  app.add_option("--gamma", gamma, "ghost penalty gamma_1[,gamma_2,...]");
  app.add_option("--gamma-sweep", gamma_sweep, "gamma values of the condition sweep");
  app.add_option("--sweep-mesh", cfg.sweep_mesh, "mesh of the gamma sweep");
  app.add_option("--samples", cfg.samples, "rotation samples");
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--out", cfg.out, "CSV output (stdout when empty)");
  app.add_option("--config", config, "key=value file overriding the flags");
  app.add_flag("--check", check, "exit nonzero when an acceptance assertion fails");
  app.add_flag("--no-timing", no_timing, "leave wall_ms empty");
  app.add_option("--gnuplot", gnuplot, "write a gnuplot script for the CSV");
  app.add_option("--mesh-stats", stats, "write active-mesh statistics CSV");
  app.add_option("--quad-dump", quad, "write the cell quadrature rules of the first mesh");
  app.add_option("--matrix-dump", matrix, "write the system matrix of the first mesh as triplets");
  app.add_option("--trim", trim_file, "trim-loop file used as the domain for --mesh-stats/--quad-dump");
  CLI11_PARSE(app, argc, argv);

  try {
    if (!meshes.empty()) cfg.meshes = harness::parse_int_list(meshes);
    if (!gamma.empty()) cfg.gamma = harness::parse_double_list(gamma);
    if (!gamma_sweep.empty()) cfg.gamma_sweep = harness::parse_double_list(gamma_sweep);
    if (no_timing) cfg.timing = false;
    if (!config.empty()) harness::apply_config_file(cfg, config);
    cfg.validate();

    const auto problem = harness::make_problem(cfg.problem, cfg.order, harness::default_angles(cfg.problem));
    Surface dump_surface = problem.surface;
    if (!trim_file.empty()) {
      dump_surface = Surface{};
      dump_surface.name = trim_file;
      dump_surface.patches.push_back({problem.surface.patches.front().map,
                                      trim::RefSubdomain(trim::load_loops(trim_file))});
    }
    if (!stats.empty()) dump_mesh_stats(cfg, dump_surface, stats);
    if (!quad.empty()) dump_quadrature(cfg, dump_surface, quad);
    if (!matrix.empty()) dump_matrix(cfg, problem, matrix);

    const auto rows = harness::run_study(cfg);
    for (const auto& r : rows)
      if (!r.note.empty()) std::cerr << "cutpatch: " << r.study << " n=" << *r.n << ": " << r.note << '\n';

    if (cfg.out.empty()) {
      harness::write_csv(std::cout, rows);
    } else {
      std::ofstream out(cfg.out);
      if (!out) throw Error(ErrorCode::io, "cannot write " + cfg.out);
      harness::write_csv(out, rows);
    }
    if (!gnuplot.empty()) {
      std::ofstream out(gnuplot);
      if (!out) throw Error(ErrorCode::io, "cannot write " + gnuplot);
      harness::write_gnuplot(out, cfg, cfg.out.empty() ? "results.csv" : cfg.out);
    }

    if (check) {
      bool ok = true;
      for (const auto& c : harness::check_study(cfg, rows)) {
        std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        ok = ok && c.pass;
      }
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "cutpatch: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
