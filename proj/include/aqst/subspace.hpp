#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aqst/error.hpp"
#include "aqst/measure.hpp"
#include "aqst/patterns.hpp"
#include "aqst/qcore.hpp"

namespace aqst {

/// Top-R eigenpairs of one observed block. `eigenvalues` holds the full
/// spectrum in descending signed order; `basis` the leading R eigenvectors.
struct LocalEigenbasis {
  CMatrix basis;
  RVector eigenvalues;
};

/// Throws Error(insufficient_block_size) when the block has fewer than R rows.
LocalEigenbasis block_top_eigvecs(const ObservedSubmatrix& sub, int rank);

/// Q = [S_r u, S_rc] kept in structured form: the local basis lives on the
/// block rows, the complement rows carry identity columns.
class PaddedBasis {
 public:
  PaddedBasis(CMatrix local_basis, IndexSet block_indices, int ambient_dim);

  const CMatrix& local_basis() const { return local_; }
  const IndexSet& block_indices() const { return block_; }
  const IndexSet& complement_indices() const { return complement_; }
  int ambient_dim() const { return dim_; }
  int rank() const { return static_cast<int>(local_.cols()); }

  /// D x (R + |r^c|) matrix with orthonormal columns.
  CMatrix dense() const;
  /// Dense projector Q Q^H.
  CMatrix projector() const;
  /// out += Q Q^H v, column by column.
  void accumulate_projection(const CMatrix& v, CMatrix& out) const;

 private:
  CMatrix local_;
  IndexSet block_;
  IndexSet complement_;
  int dim_;
};

PaddedBasis padded_basis(const CMatrix& local_basis, const IndexSet& block_indices, int ambient_dim);

/// v -> sum_l Q_l Q_l^H v without forming the D x D aggregate projector.
class AggregateProjector {
 public:
  explicit AggregateProjector(std::vector<PaddedBasis> bases);

  int dim() const { return dim_; }
  std::size_t block_count() const { return bases_.size(); }
  CMatrix apply(const CMatrix& v) const;
  CMatrix dense() const;

 private:
  std::vector<PaddedBasis> bases_;
  RVector complement_multiplicity_;  // number of blocks whose complement holds each row
  int dim_;
};

struct SubspaceEstimate {
  CMatrix basis;                        // D x R, orthonormal columns
  std::vector<RVector> block_eigvals;   // per block, descending
  RVector leading_values;               // top eigenvalues of P_tot found (>= R+1 when available)
  bool ambiguous = false;               // tie at the R-th singular value of Q_tot
  int iterations = 0;                   // matrix-free only
  int matvecs = 0;                      // matrix-free only
  RVector residuals;                    // Ritz residuals (matrix-free only)
};

/// Top-R left singular vectors of Q_tot = [Q_1, ..., Q_L], computed densely
/// as the bottom-R eigenvectors of L I - Q_tot Q_tot^H.
SubspaceEstimate global_subspace_dense(std::span<const PaddedBasis> bases, int rank);

struct MatrixFreeOptions {
  double tol = 1e-10;
  int max_iter = 500;
  int filter_degree = 16;
  int guard_vectors = 4;
  std::uint64_t seed = 0x5eed;
};

/// Raised when the iterative solver runs out of iterations. Carries the best
/// Ritz basis found and its residual norms.
class NonConvergedError : public Error {
 public:
  NonConvergedError(const std::string& what, CMatrix best, RVector residuals)
      : Error(ErrorCode::non_converged, what), best_(std::move(best)), residuals_(std::move(residuals)) {}

  const CMatrix& best_iterate() const { return best_; }
  const RVector& residuals() const { return residuals_; }

 private:
  CMatrix best_;
  RVector residuals_;
};

/// Top-R eigenvectors of P_tot through its matrix-vector action only:
/// Chebyshev-filtered block subspace iteration with Rayleigh-Ritz and
/// locking of converged pairs. Converged when every wanted Ritz pair has
/// ||P u - theta u|| <= tol.
SubspaceEstimate global_subspace_matfree(std::span<const PaddedBasis> bases, int rank,
                                         const MatrixFreeOptions& options = {});

/// (1/sqrt 2) ||X X^H - Y Y^H||_F. Throws Error(invalid_basis) when either
/// Gram matrix deviates from the identity by more than 1e-8.
double chordal_distance(const CMatrix& x, const CMatrix& y);

/// Orthonormal basis of the dominant R-dimensional eigenspace of a Hermitian matrix.
CMatrix dominant_eigenspace(const CMatrix& hermitian, int rank);

struct ErrorBudget {
  double epsilon = 0.0;             // max_l ||E_l||_2
  double delta = 0.0;               // min_l lambda_R(noisy block)
  std::vector<int> block_sizes;     // |r_l|
  double sigma_min_ptot = 0.0;      // lambda_R of the noisy aggregate projector
};

/// eps sqrt(2 sum_l |r_l|) / (delta sigma_min). Throws
/// Error(bound_inapplicable) unless delta > eps >= 0 and sigma_min > 0.
double subspace_error_bound(const ErrorBudget& budget);

/// Per-block bound eps sqrt(2 |r_l|) / delta under the same preconditions.
double block_subspace_bound(double epsilon, double delta, int block_size);

/// sqrt(2) * pinv_norm * epsilon_fro.
double perblock_projector_bound(double epsilon_fro, double pinv_norm);

/// Best rank-R approximation of a Hermitian matrix (by signed eigenvalues).
CMatrix rank_truncate(const CMatrix& hermitian, int rank);

/// Measures epsilon, delta and sigma_min(P~_tot) for noisy blocks against
/// their noiseless counterparts (same order and index sets).
ErrorBudget measure_error_budget(std::span<const ObservedSubmatrix> noisy, std::span<const ObservedSubmatrix> exact,
                                 int rank, int ambient_dim);

/// Local eigenbases plus padded bases for every observed block.
std::vector<PaddedBasis> padded_bases_from(std::span<const ObservedSubmatrix> subs, int rank, int ambient_dim,
                                           std::vector<RVector>* block_eigvals = nullptr);

}  // namespace aqst
