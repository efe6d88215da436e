#pragma once

// L2 and mesh-dependent energy errors of a discrete solution, and
// empirical orders of convergence.

#include "cutpatch/assembly.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace cutpatch::norms {

/// Pullback of the exact solution on a patch: value and reference gradient
/// (the hessian is not used).
using ExactField = std::function<geometry::RefJet(int patch, const RefPoint&)>;

struct ErrorReport {
  double h = 0.0;
  int ndof = 0;
  double err_L2 = 0.0;
  double err_energy = 0.0;
  std::optional<double> kappa;
  double wall_ms = 0.0;
};

/// sqrt(sum_i int (u_hat - u_h)^2 |G|^{1/2}). An empty `exact` means u = 0.
double error_L2(const assembly::Discretization& d, const linalg::Vector& u_h, const ExactField& exact);

/// Patchwise gradient error, ghost-penalty seminorm of u_h, interface
/// h |{n . grad e}|^2 and h^{-1} |[e]|^2, combined in quadrature.
double error_energy(const assembly::Discretization& d, const assembly::FormParams& params,
                    const linalg::Vector& u_h, const ExactField& exact);

/// Energy error split into its four groups (squares).
struct EnergyParts {
  double gradient = 0.0;
  double ghost = 0.0;
  double flux = 0.0;
  double jump = 0.0;
  double total() const { return gradient + ghost + flux + jump; }
};
EnergyParts energy_parts(const assembly::Discretization& d, const assembly::FormParams& params,
                         const linalg::Vector& u_h, const ExactField& exact);

/// log2(err(h) / err(h/2)) per consecutive pair; `errors` ordered by
/// decreasing h. Throws insufficient_data with fewer than two entries.
std::vector<double> eoc(const std::vector<double>& h, const std::vector<double>& errors);
std::vector<double> eoc_L2(const std::vector<ErrorReport>& reports);
std::vector<double> eoc_energy(const std::vector<ErrorReport>& reports);

}  // namespace cutpatch::norms
