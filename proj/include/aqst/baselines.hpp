#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aqst/measure.hpp"
#include "aqst/patterns.hpp"
#include "aqst/reconstruct.hpp"

namespace aqst {

/// Linear map rho -> (Re Tr(E_m rho))_m over Hermitian rho, stored as a dense
/// M x D^2 coefficient matrix.
class MeasurementOperator {
 public:
  explicit MeasurementOperator(std::span<const HermitianObservable> observables);

  int dim() const { return dim_; }
  Index size() const { return coeffs_.rows(); }

  RVector apply(const CMatrix& rho) const;
  /// sum_m w_m E_m.
  CMatrix adjoint(const RVector& weights) const;
  /// Restriction to the given measurement rows.
  MeasurementOperator subset(std::span<const Index> rows) const;

 private:
  MeasurementOperator() = default;
  CMatrix coeffs_;  // row m is vec(E_m^T), column-major
  int dim_ = 0;
};

struct StepRule {
  enum class Kind { fixed, backtracking };
  Kind kind = Kind::backtracking;
  double eta = 1.0;   // fixed step, or initial trial step for backtracking
  double beta = 0.5;  // backtracking shrink factor
  double c = 1e-4;    // Armijo constant

  static StepRule fixed(double eta) { return {Kind::fixed, eta, 0.5, 1e-4}; }
  static StepRule backtracking(double beta = 0.5, double c = 1e-4) { return {Kind::backtracking, 1.0, beta, c}; }
};

struct BMConfig {
  int rank = 1;
  int max_iter = 2000;
  double grad_tol = 1e-6;
  StepRule step = StepRule::backtracking();
  std::uint64_t seed = 0;
};

/// f(A) = ||y - M(A A^H)||^2.
double bm_objective(const MeasurementOperator& op, const RVector& y, const CMatrix& factor);

/// Wirtinger gradient 2 df/dconj(A) = 4 sum_m (Tr(E_m A A^H) - y_m) E_m A, so
/// that df = Re Tr(G^H dA).
CMatrix bm_gradient(const MeasurementOperator& op, const RVector& y, const CMatrix& factor);

/// Projected gradient descent on f over {||A||_F <= 1}, returning
/// project_to_physical(A A^H). Throws Error(step_size) if the objective
/// becomes non-finite.
ReconstructionResult bm_qst(const MeasurementRecord& record, const BMConfig& config);

struct NuclearConfig {
  std::optional<double> mu;  // unset: chosen on a held-out split
  int max_iter = 500;
  double obj_tol = 1e-7;
  double holdout_fraction = 0.1;
  std::vector<double> mu_grid{1e-3, 1e-2, 1e-1, 1.0, 10.0};  // multiples of ||M^*(y)||_2
  std::uint64_t seed = 0;
};

/// Accelerated proximal gradient on ||y - M(rho)||^2 + mu ||rho||_* over
/// Hermitian rho with eigenvalue soft-thresholding; the pre-projection
/// iterate is kept as raw_estimate. Non-convergence is flagged in the
/// diagnostics, not thrown.
ReconstructionResult nuclear_qst(const MeasurementRecord& record, const NuclearConfig& config);

/// Hermitian soft-thresholding of eigenvalues by `threshold`.
CMatrix eigenvalue_soft_threshold(const CMatrix& hermitian, double threshold);

/// Sum of absolute eigenvalues of the Hermitian part.
double nuclear_norm_hermitian(const CMatrix& hermitian);

/// 2 * (unique strictly-upper cells of the pattern) + D.
std::int64_t matched_budget(int dim, const SelectionPattern& pattern);

}  // namespace aqst
