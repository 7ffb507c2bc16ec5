#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace aqst {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Tolerances a matrix must meet to be accepted as a density matrix.
struct PhysicalityTolerance {
  double hermitian = 1e-12;
  double psd = 1e-10;
  double trace = 1e-10;
};

/// Measured deviations of a matrix from the density-matrix constraints.
struct PhysicalityReport {
  double hermitian_deviation = 0.0;  // max |m(r,c) - conj(m(c,r))|
  double min_eigenvalue = 0.0;       // of the Hermitian part
  double trace_deviation = 0.0;      // |Tr(m) - 1|

  bool ok(const PhysicalityTolerance& tol = {}) const;
};

PhysicalityReport physicality(const CMatrix& m);

/// Hermitian, positive-semidefinite, unit-trace state. Instances are only
/// created through checked factories, so holding one is proof of validity
/// at the tolerance it was built with.
class DensityMatrix {
 public:
  /// Throws Error(invalid_argument) if `m` violates `tol`, Error(shape) if
  /// it is not square.
  static DensityMatrix from_matrix(CMatrix m, const PhysicalityTolerance& tol = {});

  Index dim() const { return data_.rows(); }
  const CMatrix& matrix() const { return data_; }
  Complex operator()(Index r, Index c) const { return data_(r, c); }

  friend bool operator==(const DensityMatrix& a, const DensityMatrix& b) {
    return a.data_.rows() == b.data_.rows() && a.data_ == b.data_;
  }

 private:
  explicit DensityMatrix(CMatrix m) : data_(std::move(m)) {}
  CMatrix data_;
};

class HermitianObservable {
 public:
  /// Throws Error(invalid_argument) if `m` is not Hermitian to 1e-12.
  explicit HermitianObservable(CMatrix m, std::string label = {});

  Index dim() const { return data_.rows(); }
  const CMatrix& matrix() const { return data_; }
  const std::string& label() const { return label_; }

 private:
  CMatrix data_;
  std::string label_;
};

enum class Pauli { I, X, Y, Z };

char to_char(Pauli p);
/// Parses strings such as "XIZ". Throws Error(invalid_argument) on an empty
/// string or an unknown symbol.
std::vector<Pauli> parse_pauli_labels(std::string_view labels);

/// rho = G G^H / Tr(G G^H), G a D x R standard complex Gaussian matrix.
DensityMatrix ginibre_random_state(int dim, int rank, std::uint64_t seed);

/// (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to [0, 1].
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Half the sum of absolute eigenvalues of rho - sigma.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Kronecker product of single-qubit Pauli matrices, left to right.
HermitianObservable pauli_observable(std::span<const Pauli> labels);

/// Hermitize, clip negative eigenvalues, renormalize to unit trace. Falls
/// back to I/D when nothing positive survives.
DensityMatrix project_to_physical(const CMatrix& h);

/// Principal square root of the Hermitian part, negative eigenvalues clipped.
CMatrix psd_sqrt(const CMatrix& h);

/// Eigenvalues of the Hermitian part of `h`, descending.
RVector hermitian_eigenvalues_desc(const CMatrix& h);

/// Numerical rank: eigenvalues above rel_tol * max |eigenvalue|.
int numerical_rank(const CMatrix& hermitian, double rel_tol = 1e-10);

}  // namespace aqst
