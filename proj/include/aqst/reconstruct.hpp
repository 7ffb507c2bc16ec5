#pragma once

#include <span>
#include <string>
#include <vector>

#include "aqst/measure.hpp"
#include "aqst/qcore.hpp"
#include "aqst/subspace.hpp"

namespace aqst {

enum class ReconstructionMethod { columnwise, eigenvalue };
enum class SubspaceSolver { automatic, dense, matrix_free };

const char* to_string(ReconstructionMethod m);
const char* to_string(SubspaceSolver s);

struct EigenvalueEstimate {
  RVector values;               // length R, after optional clip + renormalize
  RVector raw_values;           // eigenvalues of the fitted core before post-processing
  CMatrix basis;                // input basis rotated onto the core's eigenvectors
  double trace_residual = 0.0;  // sum(raw_values) - 1
  double ls_residual = 0.0;     // ||A lambda - b|| of the stacked real system
};

/// Per-stage diagnostics shared by every reconstruction method. Fields that
/// do not apply to a method keep their defaults.
struct ReconstructionDiagnostics {
  std::vector<double> block_deltas;  // lambda_R of each observed block
  std::vector<double> block_gaps;    // lambda_R - lambda_{R+1} of each block
  double delta_estimate = 0.0;       // min over block_deltas
  double ls_residual = 0.0;
  double trace_residual = 0.0;
  std::string subspace_solver;
  int solver_iterations = 0;
  RVector eigenvalues;
  std::vector<double> objective_history;
  double regularization = 0.0;
  bool converged = true;
  int iterations = 0;
  std::vector<std::string> warnings;
};

struct ReconstructionResult {
  DensityMatrix rho_hat;  // physical estimate
  CMatrix raw_estimate;   // before the physicality projection
  std::string method;
  ReconstructionDiagnostics diagnostics;
};

/// Averages every observation of each matrix cell. `counts` is row-major.
struct ObservedEntries {
  int dim = 0;
  CMatrix values;
  std::vector<int> counts;

  bool observed(int r, int c) const { return counts[static_cast<std::size_t>(r) * dim + c] > 0; }
};

ObservedEntries collect_observations(std::span<const ObservedSubmatrix> subs, int dim);

/// For every column c solves (S^T U) x = observed entries of column c in the
/// least-squares sense (column-pivoted QR) and returns U x. Throws
/// ColumnError(underdetermined_column) when fewer than R entries are
/// observed, ColumnError(ill_conditioned_column) when cond(S^T U) exceeds
/// `max_condition`.
CMatrix complete_columns(const CMatrix& basis, std::span<const ObservedSubmatrix> subs,
                         double max_condition = 1e8, double* ls_residual = nullptr);

/// Real least-squares fit over every observed cell of rho(r,c) = U(r,:) W U(c,:)^H
/// with Hermitian R x R core W (Re/Im rows stacked), then lambda = eig(W) and
/// the basis rotated to diagonalize W. With U an exact eigenbasis W is
/// diagonal. Throws Error(degenerate_eigvalue_system) when the stacked system
/// is rank deficient.
EigenvalueEstimate estimate_eigenvalues(const CMatrix& basis, std::span<const ObservedSubmatrix> subs,
                                        bool clip_and_normalize = true);

struct AlgebraicOptions {
  ReconstructionMethod method = ReconstructionMethod::columnwise;
  SubspaceSolver solver = SubspaceSolver::automatic;
  int matrix_free_threshold = 128;  // automatic: dense below this dimension
  MatrixFreeOptions matrix_free{};
  bool clip_eigenvalues = true;
  double max_condition = 1e8;
  int dim = 0;  // 0: inferred as the largest observed index
};

/// Local EVDs, padded bases, global subspace, reconstruction and the final
/// physicality projection. Errors are rethrown as StageError naming the stage.
ReconstructionResult algebraic_qst(std::span<const ObservedSubmatrix> subs, int rank,
                                   const AlgebraicOptions& options = {});

}  // namespace aqst
