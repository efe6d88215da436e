#pragma once

// Model problems, convergence / rotation / conditioning / boundary studies
// and their CSV output.

#include "cutpatch/assembly.hpp"
#include "cutpatch/norms.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cutpatch::harness {

struct ModelProblem {
  std::string name;
  Surface surface;
  assembly::ProblemData data;
  norms::ExactField exact;
  /// Ambient exact solution and its ambient Laplace-Beltrami load, for checks.
  std::function<double(const AmbientPoint&)> u;
  std::function<double(const AmbientPoint&)> f;
};

/// "sphere", "torus", "flat2", "flat" or "cap". `angles` rotates the patches
/// (empty: no rotation). For flat2 the exact solution is in Q_p when all
/// angles vanish and in P_p otherwise.
ModelProblem make_problem(const std::string& name, int order, const std::vector<double>& angles = {});

/// Number of patches of a named problem.
int patch_count(const std::string& name);

/// Largest |f - (-Delta_Gamma u)| over `samples` random points per patch,
/// with the Laplace-Beltrami operator evaluated from the exact map.
double load_consistency(const ModelProblem& problem, int samples, std::uint64_t seed);

struct StudyConfig {
  std::string study = "convergence";
  std::string problem = "sphere";
  int order = 1;
  std::vector<int> meshes;  ///< empty: defaults for the order
  double beta = 100.0;
  std::vector<double> gamma{1e-2};
  std::vector<double> gamma_sweep{1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  int sweep_mesh = 0;  ///< 0: second mesh of the list
  int samples = 20;
  std::uint64_t seed = 42;
  std::string out;
  bool timing = true;

  std::vector<int> mesh_list() const;
  assembly::FormParams params() const;
  void validate() const;
};

std::vector<int> default_meshes(int order);

/// Fixed per-patch angles used by the convergence and boundary studies.
std::vector<double> default_angles(const std::string& problem);

/// Per-patch angles of rotation sample `sample` (uniform in [0, pi/2)).
std::vector<double> sample_angles(const std::string& problem, std::uint64_t seed, int sample);

/// One CSV row; unset fields are written empty.
struct Row {
  std::string study, problem;
  std::optional<int> p, n, ndof, sample;
  std::optional<double> h, err_L2, err_energy, eoc_L2, eoc_energy, kappa, gamma, wall_ms;
  std::optional<std::uint64_t> seed;
  // not part of the CSV
  std::string note;  ///< failure diagnostic
  std::optional<double> residual, mean, min_cut_fraction;
};

struct SolveResult {
  int ndof = 0;
  double err_L2 = 0.0;
  double err_energy = 0.0;
  double residual = 0.0;
  double mean = 0.0;
  double load_mean = 0.0;  ///< sum_i b_i = (f, 1) on closed surfaces
  double min_cut_fraction = 1.0;
  std::optional<double> kappa;
  double wall_ms = 0.0;
};

/// Discretize, assemble and solve one problem at one mesh size.
SolveResult solve_problem(const ModelProblem& problem, int n, int order, const assembly::FormParams& params,
                          bool with_kappa = false, bool strict_kernel = true);

std::vector<Row> run_convergence(const StudyConfig& cfg);
std::vector<Row> run_rotation_study(const StudyConfig& cfg);
std::vector<Row> run_condition_study(const StudyConfig& cfg);
std::vector<Row> run_boundary_example(const StudyConfig& cfg);
/// Dispatch on cfg.study.
std::vector<Row> run_study(const StudyConfig& cfg);

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Acceptance assertions for the rows of a study.
std::vector<Check> check_study(const StudyConfig& cfg, const std::vector<Row>& rows);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

void write_csv_header(std::ostream& out);
void write_csv(std::ostream& out, const std::vector<Row>& rows);
/// Gnuplot script plotting the errors (or condition numbers) of a CSV file.
void write_gnuplot(std::ostream& out, const StudyConfig& cfg, const std::string& csv_path);

/// key=value lines ('#' comments) overriding fields of cfg. Keys: study,
/// problem, order, meshes, beta, gamma, gamma_sweep, sweep_mesh, samples,
/// seed, out, timing.
void apply_config(StudyConfig& cfg, std::istream& in);
void apply_config_file(StudyConfig& cfg, const std::string& path);
void apply_setting(StudyConfig& cfg, const std::string& key, const std::string& value);

std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

}  // namespace cutpatch::harness
