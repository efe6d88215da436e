#include "cutpatch/assembly.hpp"

#include "cutpatch/kernels.hpp"

#include <cmath>

namespace cutpatch::assembly {

double FormParams::gamma_k(int k) const {
  if (gamma.empty()) return 1e-2;
  return gamma[std::min<std::size_t>(k - 1, gamma.size() - 1)];
}

void FormParams::validate() const {
  if (!(beta > 0.0)) throw Error(ErrorCode::invalid_input, "beta must be positive");
  for (double g : gamma)
    if (!(g >= 0.0)) throw Error(ErrorCode::invalid_input, "gamma_k must be non-negative");
}

Discretization::Discretization(const Surface& surface, int n, int order, DiscretizationOptions options)
    : surface_(&surface), n_(n), shape_(order) {
  bulk_degree_ = options.bulk_degree < 0 ? 2 * order + 2 : options.bulk_degree;
  const int curve_pts = options.interface_points < 0 ? order + 2 : options.interface_points;
  const mesh::BackgroundGrid grid{n};
  for (const auto& patch : surface.patches) meshes_.push_back(mesh::build_active_mesh(patch.domain, grid));

  std::vector<const mesh::ActiveMesh*> ptrs;
  for (const auto& m : meshes_) ptrs.push_back(&m);
  dofs_ = std::make_unique<basis::DofMap>(ptrs, order);

  const int interior_pts = quadrature::gauss_points_for_degree(bulk_degree_);
  for (const auto& m : meshes_) {
    std::vector<quadrature::CutRule> rules;
    rules.reserve(m.cells().size());
    for (const auto& cell : m.cells()) {
      const trim::Box box = grid.box(cell.id);
      if (cell.kind == mesh::CellKind::interior) {
        rules.push_back(quadrature::tensor_rule(box, interior_pts));
        continue;
      }
      int curve_degree = 1;
      for (const auto& loop : cell.boundary)
        for (const auto& seg : loop.segments) curve_degree = std::max(curve_degree, seg.degree);
      auto rule = quadrature::cut_cell_rule(cell.boundary, box.lo[1], bulk_degree_, curve_degree);
      rules.push_back(options.prune ? quadrature::prune_zero_weights(rule) : std::move(rule));
    }
    rules_.push_back(std::move(rules));
  }

  auto view = [&](int p) {
    return quadrature::PatchView{&surface.patches[p].map, &surface.patches[p].domain, &meshes_[p]};
  };
  for (const auto& ic : surface.interfaces)
    iface_.push_back(quadrature::interface_partition(ic.curve_i, ic.curve_j, view(ic.patch_i),
                                                     view(ic.patch_j), curve_pts));
  for (const auto& bc : surface.boundaries)
    bdry_.push_back(quadrature::boundary_partition(bc.curve, view(bc.patch), curve_pts));
}

Accumulator::Accumulator(int ndof) : b(Vector::Zero(ndof)), c(Vector::Zero(ndof)) {}

void Accumulator::add_block(std::span<const int> dofs, const std::vector<double>& K) {
  const int m = static_cast<int>(dofs.size());
  for (int a = 0; a < m; ++a)
    for (int b2 = 0; b2 < m; ++b2)
      if (K[a * m + b2] != 0.0) triplets.emplace_back(dofs[a], dofs[b2], K[a * m + b2]);
}

void Accumulator::add_vector(std::span<const int> dofs, const std::vector<double>& v, Vector& target) {
  for (std::size_t a = 0; a < dofs.size(); ++a) target[dofs[a]] += v[a];
}

SparseSym Accumulator::matrix() const { return SparseSym::from_triplets(ndof(), triplets); }

namespace {

// Basis values and reference normal derivatives on one side of a curve point.
struct SideValues {
  std::vector<double> phi, dn;
};

void side_values(const Discretization& d, const geometry::MetricData& md, int cell_id, const RefPoint& x,
                 const Vec2& nu, SideValues& out, Vec2* conormal = nullptr) {
  const int nb = d.shape().size();
  const trim::Box box = d.mesh(0).grid().box(cell_id);
  out.phi.resize(nb);
  out.dn.resize(nb);
  std::vector<double> gx(nb), gy(nb);
  d.shape().eval(box, x, 0, 0, out.phi);
  d.shape().eval_gradients(box, x, gx, gy);
  const Vec2 n = geometry::metric_normal(md, nu);
  for (int a = 0; a < nb; ++a) out.dn[a] = n[0] * gx[a] + n[1] * gy[a];
  if (conormal) *conormal = n;
}

}  // namespace

void assemble_bulk(const Discretization& d, int patch, const ProblemData* data, Accumulator& acc) {
  const auto& k = kernels::active();
  const auto& m = d.mesh(patch);
  const auto& map = d.surface().patches[patch].map;
  const auto& shape = d.shape();
  const int nb = shape.size();
  std::vector<int> dofs(nb);
  std::vector<double> phi, gx, gy, coef, wm, wf, K(nb * nb), be(nb), ce(nb);
  for (std::size_t slot = 0; slot < m.cells().size(); ++slot) {
    const auto& cell = m.cells()[slot];
    const trim::Box box = m.grid().box(cell.id);
    const auto& rule = d.rule(patch, static_cast<int>(slot));
    const int nq = static_cast<int>(rule.size());
    phi.assign(nq * nb, 0.0);
    gx.assign(nq * nb, 0.0);
    gy.assign(nq * nb, 0.0);
    coef.assign(3 * nq, 0.0);
    wm.assign(nq, 0.0);
    wf.assign(nq, 0.0);
    for (int q = 0; q < nq; ++q) {
      const RefPoint& x = rule.points[q];
      shape.eval(box, x, 0, 0, {phi.data() + q * nb, static_cast<std::size_t>(nb)});
      shape.eval_gradients(box, x, {gx.data() + q * nb, static_cast<std::size_t>(nb)},
                           {gy.data() + q * nb, static_cast<std::size_t>(nb)});
      const auto md = geometry::metric_at(map, x);
      const double w = rule.weights[q] * md.sqrt_detG;
      coef[3 * q] = w * md.Ginv(0, 0);
      coef[3 * q + 1] = w * md.Ginv(0, 1);
      coef[3 * q + 2] = w * md.Ginv(1, 1);
      wm[q] = w;
      if (data && data->load) wf[q] = w * data->load(patch, x);
    }
    std::fill(K.begin(), K.end(), 0.0);
    std::fill(be.begin(), be.end(), 0.0);
    std::fill(ce.begin(), ce.end(), 0.0);
    k.weighted_gram(nb, nq, gx.data(), gy.data(), coef.data(), K.data());
    k.weighted_load(nb, nq, phi.data(), wf.data(), be.data());
    k.weighted_load(nb, nq, phi.data(), wm.data(), ce.data());
    d.dofs().cell_dofs(patch, cell.id, dofs);
    acc.add_block(dofs, K);
    acc.add_vector(dofs, be, acc.b);
    acc.add_vector(dofs, ce, acc.c);
  }
}

void assemble_interface(const Discretization& d, int interface, const FormParams& params, Accumulator& acc) {
  const auto& k = kernels::active();
  const auto& ic = d.surface().interfaces[interface];
  const auto& map_i = d.surface().patches[ic.patch_i].map;
  const auto& map_j = d.surface().patches[ic.patch_j].map;
  const int nb = d.shape().size();
  const int m = 2 * nb;
  const double penalty = params.beta / d.h();
  std::vector<int> dofs(m);
  std::vector<double> jump(m), flux(m), L(m * m);
  SideValues si, sj;
  for (const auto& piece : d.interface_pieces(interface)) {
    d.dofs().cell_dofs(ic.patch_i, piece.owner_cell_i, {dofs.data(), static_cast<std::size_t>(nb)});
    d.dofs().cell_dofs(ic.patch_j, piece.owner_cell_j, {dofs.data() + nb, static_cast<std::size_t>(nb)});
    std::fill(L.begin(), L.end(), 0.0);
    for (const auto& cp : piece.points) {
      const auto mi = geometry::metric_at(map_i, cp.x_i);
      const auto mj = geometry::metric_at(map_j, cp.x_j);
      side_values(d, mi, piece.owner_cell_i, cp.x_i, cp.nu_i, si);
      side_values(d, mj, piece.owner_cell_j, cp.x_j, cp.nu_j, sj);
      const double ds = cp.weight * geometry::curve_measure(mi, cp.tangent_i);
      for (int a = 0; a < nb; ++a) {
        jump[a] = si.phi[a];
        jump[nb + a] = -sj.phi[a];
        flux[a] = 0.5 * si.dn[a];
        flux[nb + a] = -0.5 * sj.dn[a];
      }
      k.sym_rank2(m, -ds, flux.data(), jump.data(), L.data());
      k.rank1(m, penalty * ds, jump.data(), L.data());
    }
    acc.add_block(dofs, L);
  }
}

void assemble_ghost_penalty(const Discretization& d, int patch, const FormParams& params, Accumulator& acc) {
  const auto& k = kernels::active();
  const auto& m = d.mesh(patch);
  const int p = d.order();
  const int nb = d.shape().size();
  const double h = d.h();
  const auto& g = quadrature::gauss1d(p + 1);
  std::vector<int> dofs(2 * nb);
  std::vector<double> jump(2 * nb), L(4 * nb * nb), vm(nb), vp(nb);
  for (const auto& face : m.stab_faces()) {
    const trim::Box bm = m.grid().box(face.cell_minus);
    const trim::Box bp = m.grid().box(face.cell_plus);
    d.dofs().cell_dofs(patch, face.cell_minus, {dofs.data(), static_cast<std::size_t>(nb)});
    d.dofs().cell_dofs(patch, face.cell_plus, {dofs.data() + nb, static_cast<std::size_t>(nb)});
    std::fill(L.begin(), L.end(), 0.0);
    const int t = 1 - face.normal_axis;
    for (int order = 1; order <= p; ++order) {
      const double scale = params.gamma_k(order) * std::pow(h, 2 * order - 1);
      if (scale == 0.0) continue;
      const int dx = face.normal_axis == 0 ? order : 0;
      const int dy = face.normal_axis == 1 ? order : 0;
      for (int q = 0; q < g.size(); ++q) {
        RefPoint x = bp.lo;
        x[t] += h * g.points[q];
        d.shape().eval(bm, x, dx, dy, vm);
        d.shape().eval(bp, x, dx, dy, vp);
        for (int a = 0; a < nb; ++a) {
          jump[a] = -vm[a];  // [v] = v_plus - v_minus along +e_axis
          jump[nb + a] = vp[a];
        }
        k.rank1(2 * nb, scale * h * g.weights[q], jump.data(), L.data());
      }
    }
    acc.add_block(dofs, L);
  }
}

void assemble_boundary(const Discretization& d, const ProblemData& data, const FormParams& params,
                       Accumulator& acc) {
  const auto& k = kernels::active();
  const auto& surface = d.surface();
  const int nb = d.shape().size();
  const double penalty = params.beta / d.h();
  std::vector<int> dofs(nb);
  std::vector<double> L(nb * nb), be(nb);
  SideValues s;
  for (std::size_t bc = 0; bc < surface.boundaries.size(); ++bc) {
    const auto& curve = surface.boundaries[bc];
    const auto& map = surface.patches[curve.patch].map;
    const bool dirichlet = curve.kind == BoundaryKind::dirichlet;
    for (const auto& piece : d.boundary_pieces(static_cast<int>(bc))) {
      d.dofs().cell_dofs(curve.patch, piece.owner_cell_i, dofs);
      std::fill(L.begin(), L.end(), 0.0);
      std::fill(be.begin(), be.end(), 0.0);
      for (const auto& cp : piece.points) {
        const auto md = geometry::metric_at(map, cp.x_i);
        BoundaryPoint bp{curve.patch, cp.x_i, Vec2::Zero()};
        side_values(d, md, piece.owner_cell_i, cp.x_i, cp.nu_i, s, &bp.conormal);
        const double ds = cp.weight * geometry::curve_measure(md, cp.tangent_i);
        if (dirichlet) {
          k.rank1(nb, penalty * ds, s.phi.data(), L.data());
          k.sym_rank2(nb, -ds, s.dn.data(), s.phi.data(), L.data());
          const double fd = data.dirichlet ? data.dirichlet(bp) : 0.0;
          for (int a = 0; a < nb; ++a) be[a] += ds * fd * (penalty * s.phi[a] - s.dn[a]);
        } else {
          const double fn = data.neumann ? data.neumann(bp) : 0.0;
          for (int a = 0; a < nb; ++a) be[a] += ds * fn * s.phi[a];
        }
      }
      if (dirichlet) acc.add_block(dofs, L);
      acc.add_vector(dofs, be, acc.b);
    }
  }
}

System assemble(const Discretization& d, const ProblemData& data, const FormParams& params) {
  params.validate();
  Accumulator acc(d.dofs().num_dofs());
  for (int p = 0; p < d.num_patches(); ++p) {
    assemble_bulk(d, p, &data, acc);
    assemble_ghost_penalty(d, p, params, acc);
  }
  for (std::size_t i = 0; i < d.surface().interfaces.size(); ++i)
    assemble_interface(d, static_cast<int>(i), params, acc);
  assemble_boundary(d, data, params, acc);
  System sys;
  sys.A = acc.matrix();
  sys.b = std::move(acc.b);
  sys.c = std::move(acc.c);
  sys.constrained = d.surface().closed();
  return sys;
}

SparseSym assemble_mass(const Discretization& d) {
  const auto& k = kernels::active();
  Accumulator acc(d.dofs().num_dofs());
  const int nb = d.shape().size();
  std::vector<int> dofs(nb);
  std::vector<double> phi, w, M(nb * nb);
  for (int patch = 0; patch < d.num_patches(); ++patch) {
    const auto& m = d.mesh(patch);
    const auto& map = d.surface().patches[patch].map;
    for (std::size_t slot = 0; slot < m.cells().size(); ++slot) {
      const auto& cell = m.cells()[slot];
      const trim::Box box = m.grid().box(cell.id);
      const auto& rule = d.rule(patch, static_cast<int>(slot));
      const int nq = static_cast<int>(rule.size());
      phi.assign(nq * nb, 0.0);
      w.assign(nq, 0.0);
      for (int q = 0; q < nq; ++q) {
        d.shape().eval(box, rule.points[q], 0, 0, {phi.data() + q * nb, static_cast<std::size_t>(nb)});
        w[q] = rule.weights[q] * geometry::metric_at(map, rule.points[q]).sqrt_detG;
      }
      std::fill(M.begin(), M.end(), 0.0);
      k.weighted_mass(nb, nq, phi.data(), w.data(), M.data());
      d.dofs().cell_dofs(patch, cell.id, dofs);
      acc.add_block(dofs, M);
    }
  }
  return acc.matrix();
}

Solution solve(const System& sys, bool constrained, int direct_limit) {
  const int n = sys.A.dim();
  Solution sol;
  if (n <= direct_limit) {
    if (constrained) {
      auto s = linalg::solve_saddle(sys.A, sys.c, sys.b);
      sol.u = std::move(s.u);
      sol.multiplier = s.multiplier;
    } else {
      sol.u = linalg::solve_direct(sys.A, sys.b);
    }
  } else if (constrained) {
    // kernel of A is the constants: project the load onto the range
    const Vector ones = Vector::Ones(n);
    const double lambda = ones.dot(sys.b) / sys.c.dot(ones);
    auto cg = linalg::solve_cg(sys.A, sys.b - lambda * sys.c);
    sol.u = cg.x - (sys.c.dot(cg.x) / sys.c.dot(ones)) * ones;
    sol.multiplier = lambda;
  } else {
    sol.u = linalg::solve_cg(sys.A, sys.b).x;
  }
  const double bnorm = sys.b.norm();
  const Vector r = sys.A * sol.u + sol.multiplier * sys.c - sys.b;
  sol.residual = bnorm > 0.0 ? r.norm() / bnorm : r.norm();
  sol.mean = sys.c.dot(sol.u);
  return sol;
}

double evaluate(const Discretization& d, const Vector& u, int patch, int cell_id, const RefPoint& x, Vec2* grad) {
  const int nb = d.shape().size();
  const trim::Box box = d.mesh(patch).grid().box(cell_id);
  std::vector<int> dofs(nb);
  std::vector<double> phi(nb);
  d.dofs().cell_dofs(patch, cell_id, dofs);
  d.shape().eval(box, x, 0, 0, phi);
  double v = 0.0;
  for (int a = 0; a < nb; ++a) v += u[dofs[a]] * phi[a];
  if (grad) {
    std::vector<double> gx(nb), gy(nb);
    d.shape().eval_gradients(box, x, gx, gy);
    *grad = Vec2::Zero();
    for (int a = 0; a < nb; ++a) *grad += u[dofs[a]] * Vec2(gx[a], gy[a]);
  }
  return v;
}

}  // namespace cutpatch::assembly
