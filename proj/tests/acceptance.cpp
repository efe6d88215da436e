// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "cutpatch/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace cutpatch;
using namespace cutpatch::harness;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "[x] ") + what;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

int failures = 0;

void report(int id, const std::string& title, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = std::string("exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  failures += !v.pass;
  std::printf("%s %2d %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", id, title.c_str(), s, v.detail.c_str());
  std::fflush(stdout);
}

StudyConfig config(const std::string& study, const std::string& problem, int order) {
  StudyConfig cfg;
  cfg.study = study;
  cfg.problem = problem;
  cfg.order = order;
  cfg.timing = false;
  return cfg;
}

// Convergence rows per (problem, p), computed once for criteria 1, 2 and 9.
struct ConvergenceRun {
  std::string problem;
  int order;
  std::vector<Row> rows;
};

const std::vector<ConvergenceRun>& convergence_runs() {
  static const std::vector<ConvergenceRun> runs = [] {
    std::vector<ConvergenceRun> out;
    for (const std::string problem : {"sphere", "torus"})
      for (int p : {1, 2}) out.push_back({problem, p, run_convergence(config("convergence", problem, p))});
    return out;
  }();
  return runs;
}

// Green-identity integral of x^a y^b over straight loops.
double green_monomial(const std::vector<trim::TrimLoop>& loops, int a, int b) {
  auto binom = [](int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  double sum = 0.0;
  for (const auto& loop : loops) {
    for (const auto& seg : loop.segments) {
      const Vec2 P = seg.start(), D = seg.end() - seg.start();
      double line = 0.0;
      for (int i = 0; i <= a + 1; ++i)
        for (int j = 0; j <= b; ++j)
          line += binom(a + 1, i) * std::pow(P[0], a + 1 - i) * std::pow(D[0], i) * binom(b, j) *
                  std::pow(P[1], b - j) * std::pow(D[1], j) / (i + j + 1);
      sum += line * D[1] / (a + 1);
    }
  }
  return sum;
}

Verdict criterion_convergence(bool energy) {
  Verdict v;
  for (const auto& run : convergence_runs()) {
    const auto& last = run.rows.back();
    const auto& eoc = energy ? last.eoc_energy : last.eoc_L2;
    const double target = energy ? run.order : run.order + 1;
    const bool ok = eoc && std::abs(*eoc - target) <= 0.25;
    v.require(ok, run.problem + " p=" + std::to_string(run.order) + " EOC " + (eoc ? num(*eoc) : "n/a") + " (target " +
                      num(target) + ")");
  }
  return v;
}

Verdict criterion_conditioning() {
  Verdict v;
  const auto problem = make_problem("sphere", 1, default_angles("sphere"));
  assembly::FormParams params;
  std::vector<double> h, kappa;
  std::string list;
  for (int n : {64, 128, 256}) {
    const auto r = solve_problem(problem, n, 1, params, true);
    h.push_back(1.0 / n);
    kappa.push_back(*r.kappa);
    list += (list.empty() ? "" : ",") + num(*r.kappa);
  }
  const double slope = loglog_slope(h, kappa);
  v.require(slope >= -2.4 && slope <= -1.6, "kappa(n=64,128,256) = " + list + ", slope " + num(slope));

  auto cfg = config("condition", "sphere", 1);
  cfg.meshes = {8, 16};
  cfg.samples = 20;
  cfg.seed = 42;
  cfg.gamma_sweep = {1e-2};
  const auto rows = run_condition_study(cfg);
  std::optional<double> stab, unstab;
  int sample = -1;
  for (const auto& r : rows) {
    if (r.study != "gamma_sweep") continue;
    sample = *r.sample;
    if (*r.gamma == 0.0) unstab = r.kappa;
    else stab = r.kappa;
  }
  const bool ok = stab && unstab && *unstab >= 10 * *stab;
  v.require(ok, "adversarial sample " + std::to_string(sample) + " at n=16: kappa(gamma=0) = " +
                    (unstab ? num(*unstab) : "n/a") + ", kappa(gamma=1e-2) = " + (stab ? num(*stab) : "n/a"));
  return v;
}

Verdict criterion_quadrature() {
  Verdict v;
  const int table[6][3] = {{2, 1, 6}, {4, 1, 15}, {6, 1, 28}, {2, 2, 12}, {4, 2, 30}, {6, 2, 56}};
  bool counts = true;
  for (const auto& row : table) {
    counts = counts && quadrature::cut_rule_counts(row[0], row[1]).per_segment() == row[2];
    // a single-loop rule emits exactly the tabulated count per segment
    const auto tri = trim::polygon({{0, 0}, {1, 0}, {0, 1}});
    counts = counts && quadrature::cut_cell_rule({tri}, 0.0, row[0], row[1]).size() == 3u * row[2];
  }
  v.require(counts, "(a) cut rule point counts");

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0, 1);
  const double h = 1.0 / 16;
  const trim::Box cell{Vec2(7 * h, 9 * h), h};
  double worst = 0.0;
  int tested = 0;
  while (tested < 100) {
    const Vec2 c = cell.lo + h * Vec2(u(rng), u(rng));
    const int m = 4 + static_cast<int>(rng() % 7);
    std::vector<Vec2> vertices;
    for (int k = 0; k < m; ++k) {
      const double t = 2 * std::numbers::pi * (k + 0.4 * u(rng)) / m;
      vertices.push_back(c + h * (0.2 + 1.1 * u(rng)) * Vec2(std::cos(t), std::sin(t)));
    }
    const auto loops = trim::clip_to_cell(trim::RefSubdomain({trim::polygon(vertices)}), cell);
    if (loops.empty()) continue;
    ++tested;
    const auto rule = quadrature::cut_cell_rule(loops, cell.lo[1], 4, 1);
    double exact = 0.0, quad = 0.0;
    for (int a = 0; a <= 4; ++a) {
      for (int b = 0; b <= 4; ++b) {
        const double coef = u(rng);
        exact += coef * green_monomial(loops, a, b);
        for (std::size_t q = 0; q < rule.size(); ++q)
          quad += coef * rule.weights[q] * std::pow(rule.points[q][0], a) * std::pow(rule.points[q][1], b);
      }
    }
    worst = std::max(worst, std::abs(quad - exact) / std::abs(exact));
  }
  v.require(worst < 1e-12, "(b) 100 random polygon cells, max relative error " + num(worst));

  double worst_sum = 0.0;
  int cells = 0;
  for (const std::string name : {"sphere", "torus"}) {
    const auto problem = make_problem(name, 2, default_angles(name));
    for (int n : {8, 16}) {
      const assembly::Discretization d(problem.surface, n, 2);
      for (int p = 0; p < d.num_patches(); ++p) {
        const auto& list = d.mesh(p).cells();
        for (std::size_t s = 0; s < list.size(); ++s) {
          if (list[s].kind != mesh::CellKind::cut) continue;
          const double area = trim::signed_area(list[s].boundary);
          worst_sum = std::max(worst_sum, std::abs(d.rule(p, static_cast<int>(s)).weight_sum() - area) / area);
          ++cells;
        }
      }
    }
  }
  v.require(worst_sum < 1e-12, "(c) " + std::to_string(cells) + " cut cells, max |sum w - area| / area " + num(worst_sum));
  return v;
}

Verdict criterion_metric() {
  Verdict v;
  std::vector<geometry::PatchMap> maps;
  for (const auto& p : sphere_surface(default_angles("sphere")).patches) maps.push_back(p.map);
  for (const auto& p : torus_surface(default_angles("torus")).patches) maps.push_back(p.map);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.15, 0.85), a(0, 2 * std::numbers::pi);
  double worst = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const auto m = geometry::metric_at(maps[s % maps.size()], {u(rng), u(rng)});
    const double t = a(rng);
    const Vec2 nu(std::cos(t), std::sin(t)), tau(-std::sin(t), std::cos(t));
    const Vec2 gn = m.Ginv * nu;
    const double lhs = m.sqrt_detG * std::sqrt(gn.dot(m.G * gn));
    const double rhs = geometry::curve_measure(m, tau);
    worst = std::max(worst, std::abs(lhs - rhs) / rhs);
  }
  v.require(worst < 1e-11, "edge-measure identity, 1000 samples, max relative error " + num(worst));

  // (-Delta v, w) - (grad v, grad w) + (n . grad v, w)_boundary on the cap,
  // with resolved bulk rules and 2-point Gauss rules on boundary pieces.
  const auto surface = cap_surface(0.35);
  const auto& map = surface.patches[0].map;
  auto v_hat = [&](const RefPoint& x) {
    const Vec3 X = map.eval(x);
    const Jet a = Jet::variable(X[0], 0), b = Jet::variable(X[1], 1), c = Jet::variable(X[2], 2);
    return geometry::pullback(map, x, exp(a) * b + cos(2.0 * c));
  };
  auto w_hat = [&](const RefPoint& x) {
    const Vec3 X = map.eval(x);
    const Jet a = Jet::variable(X[0], 0), b = Jet::variable(X[1], 1), c = Jet::variable(X[2], 2);
    return geometry::pullback(map, x, sin(a + c) + b * b);
  };
  assembly::DiscretizationOptions opts;
  opts.bulk_degree = 6;
  opts.interface_points = 2;
  const int design = 2 * opts.interface_points;
  std::vector<double> h, res;
  std::string list;
  for (int n : {8, 16, 32, 64}) {
    const assembly::Discretization d(surface, n, 1, opts);
    double r = 0.0;
    const auto& cells = d.mesh(0).cells();
    for (std::size_t s = 0; s < cells.size(); ++s) {
      const auto& rule = d.rule(0, static_cast<int>(s));
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const RefPoint& x = rule.points[q];
        const auto m = geometry::metric_at(map, x);
        const auto vj = v_hat(x), wj = w_hat(x);
        const double lb = geometry::laplace_beltrami_ref(map, x, v_hat);
        r += rule.weights[q] * m.sqrt_detG * (-lb * wj.value - vj.grad.dot(m.Ginv * wj.grad));
      }
    }
    for (std::size_t k = 0; k < surface.boundaries.size(); ++k)
      for (const auto& piece : d.boundary_pieces(static_cast<int>(k)))
        for (const auto& cp : piece.points) {
          const auto m = geometry::metric_at(map, cp.x_i);
          const Vec2 conormal = geometry::metric_normal(m, cp.nu_i);
          r += cp.weight * geometry::curve_measure(m, cp.tangent_i) * conormal.dot(v_hat(cp.x_i).grad) *
               w_hat(cp.x_i).value;
        }
    h.push_back(1.0 / n);
    res.push_back(std::abs(r));
    list += (list.empty() ? "" : ",") + num(std::abs(r));
  }
  const double rate = loglog_slope(h, res);
  const double last = std::log2(res[res.size() - 2] / res.back());
  v.require(std::min(rate, last) >= design - 0.25, "Green residual (n=8..64) " + list + ", rate " + num(rate) +
                                                      ", last " + num(last) + " (design order " +
                                                      std::to_string(design) + ")");
  return v;
}

Verdict criterion_patch_test() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  for (int p = 1; p <= 3; ++p) {
    const auto problem = make_problem("flat2", p);
    double worst = 0.0;
    for (int n : default_meshes(p)) {
      const assembly::Discretization d(problem.surface, n, p);
      const auto sys = assembly::assemble(d, problem.data, assembly::FormParams{});
      const auto sol = assembly::solve(sys, false);
      for (int i = 0; i < sol.u.size(); ++i) {
        const int patch = d.dofs().dof_patch(i);
        const double exact = problem.u(problem.surface.patches[patch].map.eval(d.dofs().dof_position(i)));
        worst = std::max(worst, std::abs(sol.u[i] - exact));
      }
    }
    v.require(worst < 1e-9, "Q" + std::to_string(p) + " max nodal error " + num(worst));
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.require(s < 30.0, "wall " + num(s) + " s");
  return v;
}

Verdict criterion_rotation() {
  Verdict v;
  auto cfg = config("rotation", "sphere", 1);
  cfg.meshes = {8, 16, 32};
  cfg.samples = 20;
  cfg.seed = 42;
  const auto rows = run_rotation_study(cfg);
  int solved = 0, total = 0;
  std::vector<double> h, sd;
  std::string ratios;
  for (int n : cfg.meshes) {
    double lo = INFINITY, hi = 0.0;
    for (const auto& r : rows) {
      if (r.study != "rotation" || *r.n != n) continue;
      ++total;
      if (!r.err_L2 || !r.note.empty() || !(r.residual && *r.residual < 1e-10)) continue;
      ++solved;
      lo = std::min(lo, *r.err_L2);
      hi = std::max(hi, *r.err_L2);
    }
    ratios += (ratios.empty() ? "" : ",") + num(hi / lo);
    v.require(hi / lo < 4.0, "n=" + std::to_string(n) + " max/min L2 " + num(hi / lo));
    for (const auto& r : rows)
      if (r.study == "rotation_std" && *r.n == n) {
        h.push_back(*r.h);
        sd.push_back(*r.err_L2);
      }
  }
  v.require(solved == total && total == 60, std::to_string(solved) + "/" + std::to_string(total) + " samples solved");
  const double slope = loglog_slope(h, sd);
  v.require(std::abs(slope - 2.0) <= 0.5, "std(L2) slope " + num(slope));
  return v;
}

Verdict criterion_gamma_sweep() {
  Verdict v;
  auto cfg = config("condition", "sphere", 1);
  cfg.meshes = {8, 16};
  cfg.samples = 20;
  cfg.seed = 42;
  cfg.gamma_sweep = {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  const auto rows = run_condition_study(cfg);
  double l2_ref = NAN, l2_min = INFINITY;
  std::vector<std::pair<double, double>> kappa;
  for (const auto& r : rows) {
    if (r.study != "gamma_sweep" || *r.gamma == 0.0) continue;
    if (!r.err_L2 || !r.kappa) {
      v.require(false, "gamma=" + num(*r.gamma) + " failed: " + r.note);
      continue;
    }
    const double g = *r.gamma;
    if (g >= 1e-4 * (1 - 1e-12)) l2_min = std::min(l2_min, *r.err_L2);
    if (std::abs(g - 1e-2) < 1e-14) l2_ref = *r.err_L2;
    if (g <= 1e-2 * (1 + 1e-12)) kappa.push_back({g, *r.kappa});
  }
  v.require(l2_ref <= 2 * l2_min, "L2(1e-2) = " + num(l2_ref) + ", min over [1e-4,1] = " + num(l2_min));
  std::sort(kappa.begin(), kappa.end());
  bool monotone = true;
  std::string list;
  for (std::size_t k = 0; k < kappa.size(); ++k) {
    if (k > 0) monotone = monotone && kappa[k].second <= kappa[k - 1].second;
    list += (list.empty() ? "" : ",") + num(kappa[k].second);
  }
  v.require(monotone && kappa.size() == 5, "kappa(1e-6..1e-2) = " + list);
  return v;
}

Verdict criterion_invariants() {
  Verdict v;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  for (const std::string name : {"sphere", "torus", "flat2", "cap"}) {
    for (int p : {1, 2}) {
      const auto problem = make_problem(name, p, default_angles(name));
      const assembly::Discretization d(problem.surface, 8, p);
      const auto sys = assembly::assemble(d, problem.data, assembly::FormParams{});
      const double asym = sys.A.asymmetry() / sys.A.max_abs();
      const linalg::Vector cn = sys.c.normalized();
      int positive = 0;
      for (int t = 0; t < 100; ++t) {
        linalg::Vector x(sys.A.dim());
        for (int i = 0; i < x.size(); ++i) x[i] = g(rng);
        x -= cn.dot(x) * cn;
        positive += x.dot(sys.A * x) > 0.0;
      }
      std::string tag = name + " p=" + std::to_string(p);
      v.require(asym < 1e-10 && positive == 100, tag + ": asymmetry " + num(asym) + ", " + std::to_string(positive) + "/100 positive");
      if (sys.constrained) {
        const auto sol = assembly::solve(sys, true);
        v.require(std::abs(sol.mean) < 1e-9, tag + ": |c.u| " + num(std::abs(sol.mean)));
      }
    }
  }
  double worst_mean = 0.0;
  for (const auto& run : convergence_runs())
    for (const auto& r : run.rows)
      if (r.mean) worst_mean = std::max(worst_mean, std::abs(*r.mean));
  v.require(worst_mean < 1e-9, "convergence runs max |c.u| " + num(worst_mean));
  return v;
}

Verdict criterion_determinism() {
  Verdict v;
  auto csv = [](const StudyConfig& cfg) {
    std::ostringstream out;
    write_csv(out, run_study(cfg));
    return out.str();
  };
  auto rot = config("rotation", "torus", 1);
  rot.meshes = {4, 8};
  rot.samples = 4;
  rot.seed = 42;
  auto conv = config("convergence", "sphere", 2);
  conv.meshes = {4, 8};
  auto cond = config("condition", "flat2", 1);
  cond.meshes = {4, 8};
  cond.samples = 3;
  for (const auto& cfg : {rot, conv, cond}) {
    const std::string a = csv(cfg), b = csv(cfg);
    v.require(a == b && !a.empty(), cfg.study + "/" + cfg.problem + " identical (" + std::to_string(a.size()) + " bytes)");
  }
  return v;
}

}  // namespace

int main() {
  report(1, "energy convergence", [] { return criterion_convergence(true); });
  report(2, "L2 convergence", [] { return criterion_convergence(false); });
  report(3, "conditioning", criterion_conditioning);
  report(4, "cut quadrature", criterion_quadrature);
  report(5, "metric identities", criterion_metric);
  report(6, "flat patch test", criterion_patch_test);
  report(7, "cut robustness", criterion_rotation);
  report(8, "gamma sweep", criterion_gamma_sweep);
  report(9, "system invariants", criterion_invariants);
  report(10, "determinism", criterion_determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
