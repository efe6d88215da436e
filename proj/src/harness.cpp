#include "cutpatch/harness.hpp"

#include "cutpatch/linalg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

namespace cutpatch::harness {

namespace {

using JetField = std::function<Jet(const Jet&, const Jet&, const Jet&)>;

template <class T>
T sphere_u(const T& x, const T& y, const T&) {
  return 3.0 * x * x * y - y * y * y;
}

template <class T>
T torus_u(const T& x, const T& y, const T& z) {
  using std::atan2, std::cos, std::sin, std::sqrt;
  const T phi = atan2(y, x);
  const T theta = atan2(z, sqrt(x * x + y * y) - kTorusMajor);
  return sin(3.0 * phi) * cos(3.0 * theta + phi);
}

double torus_f(const AmbientPoint& X) {
  const double r = kTorusMinor, R = kTorusMajor;
  const double phi = std::atan2(X[1], X[0]);
  const double theta = std::atan2(X[2], std::hypot(X[0], X[1]) - R);
  const double rho = R + r * std::cos(theta);
  const double s3 = std::sin(3 * phi), c3 = std::cos(3 * phi);
  const double a = 3 * theta + phi;
  const double u_t = -3 * s3 * std::sin(a);
  const double u_tt = -9 * s3 * std::cos(a);
  const double u_pp = -10 * s3 * std::cos(a) - 6 * c3 * std::sin(a);
  return -(u_tt / (r * r) - std::sin(theta) * u_t / (r * rho) + u_pp / (rho * rho));
}

Jet ambient_jet(const JetField& u, const AmbientPoint& X) {
  return u(Jet::variable(X[0], 0), Jet::variable(X[1], 1), Jet::variable(X[2], 2));
}

Jet ipow(const Jet& x, int k) {
  Jet out(1.0);
  for (int i = 0; i < k; ++i) out = out * x;
  return out;
}

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double a) { return a == 0.0; });
}

ModelProblem finish(std::string name, Surface surface, JetField u, std::function<double(const AmbientPoint&)> f) {
  ModelProblem mp;
  mp.name = std::move(name);
  mp.surface = std::move(surface);
  std::vector<geometry::PatchMap> maps;
  for (const auto& p : mp.surface.patches) maps.push_back(p.map);
  mp.u = [u](const AmbientPoint& X) { return ambient_jet(u, X).v; };
  mp.f = f;
  mp.exact = [maps, u](int patch, const RefPoint& x) {
    return geometry::pullback(maps[patch], x, ambient_jet(u, maps[patch].eval(x)));
  };
  mp.data.load = [maps, f](int patch, const RefPoint& x) { return f(maps[patch].eval(x)); };
  mp.data.dirichlet = [maps, u](const assembly::BoundaryPoint& bp) {
    return ambient_jet(u, maps[bp.patch].eval(bp.x)).v;
  };
  mp.data.neumann = [maps, u](const assembly::BoundaryPoint& bp) {
    const auto& map = maps[bp.patch];
    return geometry::pullback(map, bp.x, ambient_jet(u, map.eval(bp.x))).grad.dot(bp.conormal);
  };
  return mp;
}

// -Laplacian of a planar field
std::function<double(const AmbientPoint&)> planar_load(const JetField& u) {
  return [u](const AmbientPoint& X) {
    const Jet j = ambient_jet(u, X);
    return -(j.H(0, 0) + j.H(1, 1));
  };
}

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

bool closed_problem(const std::string& name) { return name == "sphere" || name == "torus"; }

}  // namespace

int patch_count(const std::string& name) {
  if (name == "sphere") return 6;
  if (name == "torus") return 8;
  if (name == "flat2") return 2;
  if (name == "flat" || name == "cap") return 1;
  throw Error(ErrorCode::invalid_input, "unknown problem '" + name + "'");
}

ModelProblem make_problem(const std::string& name, int order, const std::vector<double>& angles) {
  if (name == "sphere") {
    return finish(name, sphere_surface(angles), [](const Jet& x, const Jet& y, const Jet& z) { return sphere_u(x, y, z); },
                  [](const AmbientPoint& X) { return 12.0 * sphere_u(X[0], X[1], X[2]); });
  }
  if (name == "torus") {
    return finish(name, torus_surface(angles), [](const Jet& x, const Jet& y, const Jet& z) { return torus_u(x, y, z); },
                  torus_f);
  }
  if (name == "cap") {
    const double a = angles.empty() ? 0.0 : angles.at(0);
    return finish(name, cap_surface(a), [](const Jet& x, const Jet& y, const Jet& z) { return sphere_u(x, y, z); },
                  [](const AmbientPoint& X) { return 12.0 * sphere_u(X[0], X[1], X[2]); });
  }
  if (name == "flat") {
    const double a = angles.empty() ? 0.0 : angles.at(0);
    JetField u = [](const Jet& x, const Jet&, const Jet&) { return x; };
    return finish(name, flat_surface(a), u, planar_load(u));
  }
  if (name == "flat2") {
    JetField u;
    if (all_zero(angles)) {
      u = [order](const Jet& x, const Jet& y, const Jet&) {
        return (1.0 + x + ipow(x, order)) * (2.0 - y + 0.5 * ipow(y, order));
      };
    } else {
      u = [order](const Jet& x, const Jet& y, const Jet&) {
        return 1.0 + x - 2.0 * y + 0.5 * ipow(x + 0.3 * y, order);
      };
    }
    return finish(name, flat2_surface(angles), u, planar_load(u));
  }
  throw Error(ErrorCode::invalid_input, "unknown problem '" + name + "'");
}

double load_consistency(const ModelProblem& problem, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.05, 0.95);
  double worst = 0.0;
  for (const auto& patch : problem.surface.patches) {
    const auto& map = patch.map;
    for (int s = 0; s < samples; ++s) {
      const RefPoint x = map.placement().to_reference(Vec2(uni(rng), uni(rng)));
      const int k = static_cast<int>(&patch - problem.surface.patches.data());
      const double lb =
          geometry::laplace_beltrami_ref(map, x, [&](const RefPoint& y) { return problem.exact(k, y); });
      worst = std::max(worst, std::abs(problem.f(map.eval(x)) + lb));
    }
  }
  return worst;
}

// ---------------------------------------------------------------- config

std::vector<int> default_meshes(int order) {
  if (order == 1) return {8, 16, 32, 64};
  return {4, 8, 16, 32};
}

std::vector<int> StudyConfig::mesh_list() const { return meshes.empty() ? default_meshes(order) : meshes; }

assembly::FormParams StudyConfig::params() const {
  assembly::FormParams fp;
  fp.beta = beta;
  fp.gamma = gamma;
  return fp;
}

void StudyConfig::validate() const {
  if (order < 1 || order > 3) throw Error(ErrorCode::unsupported_order, "order must be 1, 2 or 3");
  patch_count(problem);
  const auto m = mesh_list();
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (m[k] < 2) throw Error(ErrorCode::invalid_input, "mesh sizes must be >= 2");
    if (k > 0 && m[k] <= m[k - 1]) throw Error(ErrorCode::invalid_input, "mesh list must be strictly increasing");
  }
  if (study == "rotation" && samples < 2) throw Error(ErrorCode::invalid_input, "rotation study needs >= 2 samples");
  params().validate();
}

std::vector<double> default_angles(const std::string& problem) {
  std::vector<double> a(patch_count(problem));
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = 0.1 + 0.13 * static_cast<double>(i);
  return a;
}

std::vector<double> sample_angles(const std::string& problem, std::uint64_t seed, int sample) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(sample)};
  std::mt19937_64 rng(seq);
  std::vector<double> a(patch_count(problem));
  for (auto& v : a) v = 0.5 * std::numbers::pi * std::generate_canonical<double, 64>(rng);
  return a;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stoi(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_input, "bad integer '" + item + "'");
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_input, "bad number '" + item + "'");
    }
  }
  return out;
}

void apply_setting(StudyConfig& cfg, const std::string& key, const std::string& value) {
  auto one_int = [&] {
    const auto v = parse_int_list(value);
    if (v.size() != 1) throw Error(ErrorCode::invalid_input, key + " expects one integer");
    return v[0];
  };
  if (key == "study") cfg.study = value;
  else if (key == "problem") cfg.problem = value;
  else if (key == "order") cfg.order = one_int();
  else if (key == "meshes") cfg.meshes = parse_int_list(value);
  else if (key == "beta") {
    const auto v = parse_double_list(value);
    if (v.size() != 1) throw Error(ErrorCode::invalid_input, "beta expects one number");
    cfg.beta = v[0];
  } else if (key == "gamma") cfg.gamma = parse_double_list(value);
  else if (key == "gamma_sweep") cfg.gamma_sweep = parse_double_list(value);
  else if (key == "sweep_mesh") cfg.sweep_mesh = one_int();
  else if (key == "samples") cfg.samples = one_int();
  else if (key == "seed") {
    try {
      cfg.seed = std::stoull(value);
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_input, "bad seed '" + value + "'");
    }
  } else if (key == "out") cfg.out = value;
  else if (key == "timing") cfg.timing = !(value == "0" || value == "false" || value == "no");
  else throw Error(ErrorCode::invalid_input, "unknown config key '" + key + "'");
}

void apply_config(StudyConfig& cfg, std::istream& in) {
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::invalid_input, "config line " + std::to_string(lineno) + ": expected key=value");
    apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void apply_config_file(StudyConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config file " + path);
  apply_config(cfg, in);
}

// ---------------------------------------------------------------- solving

SolveResult solve_problem(const ModelProblem& problem, int n, int order, const assembly::FormParams& params,
                          bool with_kappa, bool strict_kernel) {
  const double t0 = now_ms();
  SolveResult r;
  assembly::Discretization d(problem.surface, n, order);
  const auto sys = assembly::assemble(d, problem.data, params);
  const auto sol = assembly::solve(sys, sys.constrained);
  r.ndof = sys.A.dim();
  r.residual = sol.residual;
  r.mean = sol.mean;
  r.load_mean = sys.b.sum();
  r.err_L2 = norms::error_L2(d, sol.u, problem.exact);
  r.err_energy = norms::error_energy(d, params, sol.u, problem.exact);
  for (int p = 0; p < d.num_patches(); ++p) r.min_cut_fraction = std::min(r.min_cut_fraction, d.mesh(p).min_cut_fraction());
  if (with_kappa) {
    const int kernel = sys.constrained ? 1 : 0;
    std::vector<linalg::Vector> basis;
    if (kernel) basis.push_back(linalg::Vector::Ones(r.ndof));
    linalg::ConditionOptions opts;
    opts.strict_kernel = strict_kernel;
    r.kappa = linalg::condition_estimate(sys.A, kernel, basis, opts);
  }
  r.wall_ms = now_ms() - t0;
  return r;
}

namespace {

Row base_row(const StudyConfig& cfg, const std::string& study, int n) {
  Row row;
  row.study = study;
  row.problem = cfg.problem;
  row.p = cfg.order;
  row.n = n;
  row.h = 1.0 / n;
  row.seed = cfg.seed;
  return row;
}

void fill(Row& row, const SolveResult& r, const StudyConfig& cfg) {
  row.ndof = r.ndof;
  row.err_L2 = r.err_L2;
  row.err_energy = r.err_energy;
  row.residual = r.residual;
  row.mean = r.mean;
  row.min_cut_fraction = r.min_cut_fraction;
  row.kappa = r.kappa;
  if (cfg.timing) row.wall_ms = r.wall_ms;
}

void add_eocs(std::vector<Row>& rows, std::size_t first) {
  for (std::size_t k = first + 1; k < rows.size(); ++k) {
    const Row& a = rows[k - 1];
    Row& b = rows[k];
    if (!a.err_L2 || !b.err_L2 || !a.h || !b.h) continue;
    const double lh = std::log(*a.h / *b.h);
    b.eoc_L2 = std::log(*a.err_L2 / *b.err_L2) / lh;
    b.eoc_energy = std::log(*a.err_energy / *b.err_energy) / lh;
  }
}

std::vector<Row> run_levels(const StudyConfig& cfg, const std::string& study, const std::vector<double>& angles) {
  const auto problem = make_problem(cfg.problem, cfg.order, angles);
  std::vector<Row> rows;
  for (int n : cfg.mesh_list()) {
    Row row = base_row(cfg, study, n);
    row.gamma = cfg.gamma.front();
    try {
      fill(row, solve_problem(problem, n, cfg.order, cfg.params()), cfg);
      rows.push_back(row);
    } catch (const Error& e) {
      row.note = e.what();
      rows.push_back(row);
      break;
    }
  }
  add_eocs(rows, 0);
  return rows;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0;
}

double smallest_cut(const ModelProblem& problem, int n) {
  double m = 1.0;
  const mesh::BackgroundGrid grid{n};
  for (const auto& patch : problem.surface.patches)
    m = std::min(m, mesh::build_active_mesh(patch.domain, grid).min_cut_fraction());
  return m;
}

}  // namespace

std::vector<Row> run_convergence(const StudyConfig& cfg) {
  cfg.validate();
  return run_levels(cfg, "convergence", default_angles(cfg.problem));
}

std::vector<Row> run_boundary_example(const StudyConfig& cfg) {
  cfg.validate();
  if (closed_problem(cfg.problem))
    throw Error(ErrorCode::invalid_input, "boundary example needs a problem with boundary curves");
  return run_levels(cfg, "boundary", default_angles(cfg.problem));
}

std::vector<Row> run_rotation_study(const StudyConfig& cfg) {
  cfg.validate();
  std::vector<Row> rows, summary;
  for (int n : cfg.mesh_list()) {
    std::vector<double> l2, en;
    for (int s = 0; s < cfg.samples; ++s) {
      Row row = base_row(cfg, "rotation", n);
      row.sample = s;
      row.gamma = cfg.gamma.front();
      try {
        const auto problem = make_problem(cfg.problem, cfg.order, sample_angles(cfg.problem, cfg.seed, s));
        fill(row, solve_problem(problem, n, cfg.order, cfg.params()), cfg);
        l2.push_back(*row.err_L2);
        en.push_back(*row.err_energy);
      } catch (const Error& e) {
        row.note = e.what();
      }
      rows.push_back(row);
    }
    if (l2.size() < 2) continue;
    Row sd = base_row(cfg, "rotation_std", n);
    sd.gamma = cfg.gamma.front();
    sd.err_L2 = std_of(l2);
    sd.err_energy = std_of(en);
    summary.push_back(sd);
  }
  add_eocs(summary, 0);
  std::vector<Row> rel;
  for (const auto& sd : summary) {
    Row r = sd;
    r.study = "rotation_relstd";
    r.eoc_L2.reset();
    r.eoc_energy.reset();
    std::vector<double> l2, en;
    for (const auto& row : rows)
      if (row.n == sd.n && row.err_L2) {
        l2.push_back(*row.err_L2);
        en.push_back(*row.err_energy);
      }
    r.err_L2 = *sd.err_L2 / mean_of(l2);
    r.err_energy = *sd.err_energy / mean_of(en);
    rel.push_back(r);
  }
  rows.insert(rows.end(), summary.begin(), summary.end());
  rows.insert(rows.end(), rel.begin(), rel.end());
  return rows;
}

std::vector<Row> run_condition_study(const StudyConfig& cfg) {
  cfg.validate();
  std::vector<Row> rows;
  const auto meshes = cfg.mesh_list();

  // kappa against h at the configured gamma and without stabilization
  const auto problem = make_problem(cfg.problem, cfg.order, default_angles(cfg.problem));
  for (const double g : {cfg.gamma.front(), 0.0}) {
    const std::string study = g == 0.0 ? "condition_unstab" : "condition";
    auto params = cfg.params();
    if (g == 0.0) params.gamma = {0.0};
    for (int n : meshes) {
      Row row = base_row(cfg, study, n);
      row.gamma = g;
      try {
        fill(row, solve_problem(problem, n, cfg.order, params, true, g != 0.0), cfg);
      } catch (const Error& e) {
        row.note = e.what();
      }
      rows.push_back(row);
    }
  }

  // gamma sweep on the rotation sample with the smallest cut fraction
  const int n = cfg.sweep_mesh > 0 ? cfg.sweep_mesh : meshes[std::min<std::size_t>(1, meshes.size() - 1)];
  int worst = 0;
  double worst_fraction = 2.0;
  for (int s = 0; s < cfg.samples; ++s) {
    const auto candidate = make_problem(cfg.problem, cfg.order, sample_angles(cfg.problem, cfg.seed, s));
    const double f = smallest_cut(candidate, n);
    if (f < worst_fraction) {
      worst_fraction = f;
      worst = s;
    }
  }
  const auto adversarial = make_problem(cfg.problem, cfg.order, sample_angles(cfg.problem, cfg.seed, worst));
  std::vector<double> gammas{0.0};
  gammas.insert(gammas.end(), cfg.gamma_sweep.begin(), cfg.gamma_sweep.end());
  for (double g : gammas) {
    Row row = base_row(cfg, "gamma_sweep", n);
    row.sample = worst;
    row.gamma = g;
    auto params = cfg.params();
    params.gamma = {g};
    try {
      fill(row, solve_problem(adversarial, n, cfg.order, params, true, g != 0.0), cfg);
    } catch (const Error& e) {
      row.note = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<Row> run_study(const StudyConfig& cfg) {
  if (cfg.study == "convergence") return run_convergence(cfg);
  if (cfg.study == "rotation") return run_rotation_study(cfg);
  if (cfg.study == "condition") return run_condition_study(cfg);
  if (cfg.study == "boundary") return run_boundary_example(cfg);
  throw Error(ErrorCode::invalid_input, "unknown study '" + cfg.study + "'");
}

// ---------------------------------------------------------------- checks

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::insufficient_data, "slope needs two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<const Row*> select(const std::vector<Row>& rows, const std::string& study) {
  std::vector<const Row*> out;
  for (const auto& r : rows)
    if (r.study == study) out.push_back(&r);
  return out;
}

Check within(const std::string& name, double value, double lo, double hi) {
  return {name, value >= lo && value <= hi, fmt(value) + " in [" + fmt(lo) + ", " + fmt(hi) + "]"};
}

Check all_solved(const std::vector<const Row*>& rows, const std::string& name) {
  for (const auto* r : rows)
    if (!r->note.empty() || !r->err_L2) return {name, false, r->note.empty() ? "missing result" : r->note};
  return {name, !rows.empty(), std::to_string(rows.size()) + " solves"};
}

Check solve_invariants(const std::vector<const Row*>& rows, bool closed) {
  double res = 0.0, mean = 0.0;
  for (const auto* r : rows) {
    if (r->residual) res = std::max(res, *r->residual);
    if (r->mean) mean = std::max(mean, std::abs(*r->mean));
  }
  const bool ok = res < 1e-10 && (!closed || mean < 1e-9);
  return {"solve residual and mean constraint", ok, "residual " + fmt(res) + ", |c^T u| " + fmt(mean)};
}

}  // namespace

std::vector<Check> check_study(const StudyConfig& cfg, const std::vector<Row>& rows) {
  std::vector<Check> out;
  const int p = cfg.order;
  const bool closed = closed_problem(cfg.problem);
  if (cfg.study == "convergence" || cfg.study == "boundary") {
    const auto levels = select(rows, cfg.study);
    out.push_back(all_solved(levels, "all levels solve"));
    if (!out.back().pass) return out;
    out.push_back(solve_invariants(levels, closed));
    if (cfg.problem == "flat2" || cfg.problem == "flat") {
      double worst = 0.0;
      for (const auto* r : levels) worst = std::max(worst, *r->err_L2);
      out.push_back({"polynomial solution reproduced", worst < 1e-9, "max L2 error " + fmt(worst)});
    } else if (levels.size() >= 2) {
      const Row& last = *levels.back();
      const double tol = cfg.study == "boundary" ? 0.2 : 0.25;
      if (cfg.study == "convergence") out.push_back(within("final energy EOC", *last.eoc_energy, p - tol, p + tol));
      out.push_back(within("final L2 EOC", *last.eoc_L2, p + 1 - tol, p + 1 + tol));
    }
  } else if (cfg.study == "rotation") {
    const auto samples = select(rows, "rotation");
    out.push_back(all_solved(samples, "all rotation samples solve"));
    if (!out.back().pass) return out;
    out.push_back(solve_invariants(samples, closed));
    double worst_ratio = 0.0;
    for (int n : cfg.mesh_list()) {
      double lo = INFINITY, hi = 0.0;
      for (const auto* r : samples)
        if (r->n == n) {
          lo = std::min(lo, *r->err_L2);
          hi = std::max(hi, *r->err_L2);
        }
      worst_ratio = std::max(worst_ratio, hi / lo);
    }
    out.push_back({"per-level max/min L2 ratio < 4", worst_ratio < 4.0, "worst ratio " + fmt(worst_ratio)});
    if (p == 1) {
      std::vector<double> h, sd;
      for (const auto* r : select(rows, "rotation_std")) {
        h.push_back(*r->h);
        sd.push_back(*r->err_L2);
      }
      if (h.size() >= 2) out.push_back(within("std(L2) slope", loglog_slope(h, sd), 1.5, 2.5));
    }
  } else if (cfg.study == "condition") {
    const auto stab = select(rows, "condition");
    out.push_back(all_solved(stab, "stabilized condition runs"));
    if (out.back().pass) {
      std::vector<double> h, k;
      for (const auto* r : stab) {
        h.push_back(*r->h);
        k.push_back(*r->kappa);
      }
      out.push_back(within("kappa vs h slope", loglog_slope(h, k), -2.4, -1.6));
    }
    const auto sweep = select(rows, "gamma_sweep");
    auto at = [&](double g) -> const Row* {
      for (const auto* r : sweep)
        if (r->gamma && std::abs(*r->gamma - g) <= 1e-12 * std::max(1.0, g) && r->kappa) return r;
      return nullptr;
    };
    const Row* g0 = at(0.0);
    const Row* gref = at(cfg.gamma.front());
    if (g0 && gref)
      out.push_back({"unstabilized kappa >= 10 x stabilized", *g0->kappa >= 10.0 * *gref->kappa,
                     fmt(*g0->kappa) + " vs " + fmt(*gref->kappa)});
    else
      out.push_back({"unstabilized kappa >= 10 x stabilized", false, "missing sweep rows"});
    double best = INFINITY;
    for (const auto* r : sweep)
      if (r->gamma && *r->gamma >= 1e-4 && *r->gamma <= 1.0 && r->err_L2) best = std::min(best, *r->err_L2);
    const Row* g2 = at(1e-2);
    if (g2 && std::isfinite(best))
      out.push_back({"L2 at gamma=1e-2 within 2x of sweep minimum", *g2->err_L2 <= 2.0 * best,
                     fmt(*g2->err_L2) + " vs min " + fmt(best)});
    bool monotone = true;
    std::string detail;
    double prev = INFINITY;
    for (const auto* r : sweep) {
      if (!r->gamma || *r->gamma < 1e-6 || *r->gamma > 1e-2) continue;
      if (!r->kappa) {
        monotone = false;
        detail += " missing";
        continue;
      }
      if (*r->kappa > prev) monotone = false;
      prev = *r->kappa;
      detail += " " + fmt(*r->kappa);
    }
    out.push_back({"kappa non-increasing for gamma in [1e-6, 1e-2]", monotone, "kappa:" + detail});
  }
  return out;
}

// ---------------------------------------------------------------- output

void write_csv_header(std::ostream& out) {
  out << "study,problem,p,n,h,ndof,err_L2,err_energy,eoc_L2,eoc_energy,kappa,gamma,sample,seed,wall_ms\n";
}

namespace {

void put(std::ostream& out, const std::optional<double>& v) {
  if (!v) return;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", *v);
  out << buf;
}

template <class I>
void put(std::ostream& out, const std::optional<I>& v) {
  if (v) out << *v;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<Row>& rows) {
  write_csv_header(out);
  for (const auto& r : rows) {
    out << r.study << ',' << r.problem << ',';
    put(out, r.p);
    out << ',';
    put(out, r.n);
    out << ',';
    put(out, r.h);
    out << ',';
    put(out, r.ndof);
    out << ',';
    put(out, r.err_L2);
    out << ',';
    put(out, r.err_energy);
    out << ',';
    put(out, r.eoc_L2);
    out << ',';
    put(out, r.eoc_energy);
    out << ',';
    put(out, r.kappa);
    out << ',';
    put(out, r.gamma);
    out << ',';
    put(out, r.sample);
    out << ',';
    put(out, r.seed);
    out << ',';
    put(out, r.wall_ms);
    out << '\n';
  }
}

void write_gnuplot(std::ostream& out, const StudyConfig& cfg, const std::string& csv_path) {
  out << "set datafile separator ','\n"
      << "set logscale xy\n"
      << "set key left top\n"
      << "set xlabel 'h'\n";
  if (cfg.study == "condition") {
    out << "set ylabel 'condition number'\n"
        << "plot '" << csv_path << "' using (strcol(1) eq 'condition' ? $5 : 1/0):11 with linespoints title 'stabilized', \\\n"
        << "     '" << csv_path << "' using (strcol(1) eq 'condition_unstab' ? $5 : 1/0):11 with linespoints title 'gamma = 0', \\\n"
        << "     x**-2 dashtype 2 title 'h^-2'\n";
    return;
  }
  const std::string study = cfg.study == "rotation" ? "rotation_std" : cfg.study;
  const int p = cfg.order;
  out << "set ylabel 'error'\n"
      << "plot '" << csv_path << "' using (strcol(1) eq '" << study << "' ? $5 : 1/0):7 with linespoints title 'L2', \\\n"
      << "     '" << csv_path << "' using (strcol(1) eq '" << study << "' ? $5 : 1/0):8 with linespoints title 'energy', \\\n"
      << "     x**" << p + 1 << " dashtype 2 title 'h^" << p + 1 << "', \\\n"
      << "     x**" << p << " dashtype 2 title 'h^" << p << "'\n";
}

}  // namespace cutpatch::harness
