#include "cutpatch/norms.hpp"

#include <cmath>

namespace cutpatch::norms {

using assembly::Discretization;
using linalg::Vector;

namespace {

geometry::RefJet exact_at(const ExactField& exact, int patch, const RefPoint& x) {
  return exact ? exact(patch, x) : geometry::RefJet{};
}

}  // namespace

double error_L2(const Discretization& d, const Vector& u_h, const ExactField& exact) {
  double sum = 0.0;
  for (int patch = 0; patch < d.num_patches(); ++patch) {
    const auto& m = d.mesh(patch);
    const auto& map = d.surface().patches[patch].map;
    for (std::size_t slot = 0; slot < m.cells().size(); ++slot) {
      const int id = m.cells()[slot].id;
      const auto& rule = d.rule(patch, static_cast<int>(slot));
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const RefPoint& x = rule.points[q];
        const double e = exact_at(exact, patch, x).value - assembly::evaluate(d, u_h, patch, id, x);
        sum += rule.weights[q] * geometry::metric_at(map, x).sqrt_detG * e * e;
      }
    }
  }
  return std::sqrt(std::max(sum, 0.0));
}

EnergyParts energy_parts(const Discretization& d, const assembly::FormParams& params, const Vector& u_h,
                         const ExactField& exact) {
  EnergyParts out;
  const double h = d.h();
  const int p = d.order();
  const int nb = d.shape().size();

  for (int patch = 0; patch < d.num_patches(); ++patch) {
    const auto& m = d.mesh(patch);
    const auto& map = d.surface().patches[patch].map;
    for (std::size_t slot = 0; slot < m.cells().size(); ++slot) {
      const int id = m.cells()[slot].id;
      const auto& rule = d.rule(patch, static_cast<int>(slot));
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const RefPoint& x = rule.points[q];
        Vec2 gh;
        assembly::evaluate(d, u_h, patch, id, x, &gh);
        const Vec2 ge = exact_at(exact, patch, x).grad - gh;
        const auto md = geometry::metric_at(map, x);
        out.gradient += rule.weights[q] * md.sqrt_detG * ge.dot(md.Ginv * ge);
      }
    }

    // ghost seminorm of u_h
    const auto& g = quadrature::gauss1d(p + 1);
    std::vector<int> dm(nb), dp(nb);
    std::vector<double> vm(nb), vp(nb);
    for (const auto& face : m.stab_faces()) {
      const trim::Box bm = m.grid().box(face.cell_minus);
      const trim::Box bp = m.grid().box(face.cell_plus);
      d.dofs().cell_dofs(patch, face.cell_minus, dm);
      d.dofs().cell_dofs(patch, face.cell_plus, dp);
      const int t = 1 - face.normal_axis;
      for (int k = 1; k <= p; ++k) {
        const int dx = face.normal_axis == 0 ? k : 0;
        const int dy = face.normal_axis == 1 ? k : 0;
        for (int q = 0; q < g.size(); ++q) {
          RefPoint x = bp.lo;
          x[t] += h * g.points[q];
          d.shape().eval(bm, x, dx, dy, vm);
          d.shape().eval(bp, x, dx, dy, vp);
          double jump = 0.0;
          for (int a = 0; a < nb; ++a) jump += u_h[dp[a]] * vp[a] - u_h[dm[a]] * vm[a];
          out.ghost += params.gamma_k(k) * std::pow(h, 2 * k - 1) * h * g.weights[q] * jump * jump;
        }
      }
    }
  }

  for (std::size_t k = 0; k < d.surface().interfaces.size(); ++k) {
    const auto& ic = d.surface().interfaces[k];
    const auto& map_i = d.surface().patches[ic.patch_i].map;
    const auto& map_j = d.surface().patches[ic.patch_j].map;
    for (const auto& piece : d.interface_pieces(static_cast<int>(k))) {
      for (const auto& cp : piece.points) {
        const auto mi = geometry::metric_at(map_i, cp.x_i);
        const auto mj = geometry::metric_at(map_j, cp.x_j);
        Vec2 gi, gj;
        const double ui = assembly::evaluate(d, u_h, ic.patch_i, piece.owner_cell_i, cp.x_i, &gi);
        const double uj = assembly::evaluate(d, u_h, ic.patch_j, piece.owner_cell_j, cp.x_j, &gj);
        const auto ei = exact_at(exact, ic.patch_i, cp.x_i);
        const auto ej = exact_at(exact, ic.patch_j, cp.x_j);
        const Vec2 ni = geometry::metric_normal(mi, cp.nu_i);
        const Vec2 nj = geometry::metric_normal(mj, cp.nu_j);
        const double flux = 0.5 * (ni.dot(ei.grad - gi) - nj.dot(ej.grad - gj));
        const double jump = (ei.value - ui) - (ej.value - uj);
        const double ds = cp.weight * geometry::curve_measure(mi, cp.tangent_i);
        out.flux += h * ds * flux * flux;
        out.jump += ds * jump * jump / h;
      }
    }
  }
  return out;
}

double error_energy(const Discretization& d, const assembly::FormParams& params, const Vector& u_h,
                    const ExactField& exact) {
  return std::sqrt(std::max(energy_parts(d, params, u_h, exact).total(), 0.0));
}

std::vector<double> eoc(const std::vector<double>& h, const std::vector<double>& errors) {
  if (h.size() != errors.size() || errors.size() < 2)
    throw Error(ErrorCode::insufficient_data, "need at least two error values");
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    if (h[k] == h[k + 1]) throw Error(ErrorCode::insufficient_data, "repeated mesh size");
    out.push_back(std::log(errors[k] / errors[k + 1]) / std::log(h[k] / h[k + 1]));
  }
  return out;
}

namespace {

std::vector<double> eoc_of(const std::vector<ErrorReport>& reports, double ErrorReport::*field) {
  std::vector<double> h, e;
  for (const auto& r : reports) {
    h.push_back(r.h);
    e.push_back(r.*field);
  }
  return eoc(h, e);
}

}  // namespace

std::vector<double> eoc_L2(const std::vector<ErrorReport>& reports) {
  return eoc_of(reports, &ErrorReport::err_L2);
}

std::vector<double> eoc_energy(const std::vector<ErrorReport>& reports) {
  return eoc_of(reports, &ErrorReport::err_energy);
}

}  // namespace cutpatch::norms
