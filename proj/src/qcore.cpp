#include "aqst/qcore.hpp"

#include <algorithm>
#include <cmath>

#include "aqst/error.hpp"
#include "aqst/rng.hpp"

namespace aqst {
namespace {

CMatrix hermitian_part(const CMatrix& h) {
  return (h + h.adjoint()) * 0.5;
}

double max_hermitian_deviation(const CMatrix& m) {
  double dev = 0.0;
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = 0; r < m.rows(); ++r)
      dev = std::max(dev, std::abs(m(r, c) - std::conj(m(c, r))));
  return dev;
}

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(ErrorCode::shape, std::string(what) + ": matrix must be square and non-empty");
}

void require_same_dim(const DensityMatrix& a, const DensityMatrix& b, const char* what) {
  if (a.dim() != b.dim())
    throw Error(ErrorCode::shape, std::string(what) + ": dimension mismatch (" +
                                      std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
}

}  // namespace

bool PhysicalityReport::ok(const PhysicalityTolerance& tol) const {
  return hermitian_deviation <= tol.hermitian && min_eigenvalue >= -tol.psd &&
         trace_deviation <= tol.trace;
}

PhysicalityReport physicality(const CMatrix& m) {
  require_square(m, "physicality");
  PhysicalityReport report;
  report.hermitian_deviation = max_hermitian_deviation(m);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(m), Eigen::EigenvaluesOnly);
  report.min_eigenvalue = eig.eigenvalues()(0);
  report.trace_deviation = std::abs(m.trace() - Complex(1.0, 0.0));
  return report;
}

DensityMatrix DensityMatrix::from_matrix(CMatrix m, const PhysicalityTolerance& tol) {
  require_square(m, "DensityMatrix");
  const PhysicalityReport report = physicality(m);
  if (!report.ok(tol)) {
    throw Error(ErrorCode::invalid_argument,
                "not a density matrix: hermitian deviation " + std::to_string(report.hermitian_deviation) +
                    ", min eigenvalue " + std::to_string(report.min_eigenvalue) + ", trace deviation " +
                    std::to_string(report.trace_deviation));
  }
  return DensityMatrix(std::move(m));
}

HermitianObservable::HermitianObservable(CMatrix m, std::string label)
    : data_(std::move(m)), label_(std::move(label)) {
  require_square(data_, "HermitianObservable");
  if (max_hermitian_deviation(data_) > 1e-12)
    throw Error(ErrorCode::invalid_argument, "observable is not Hermitian");
}

char to_char(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

std::vector<Pauli> parse_pauli_labels(std::string_view labels) {
  if (labels.empty()) throw Error(ErrorCode::invalid_argument, "empty Pauli label string");
  std::vector<Pauli> out;
  out.reserve(labels.size());
  for (char ch : labels) {
    switch (ch) {
      case 'I': out.push_back(Pauli::I); break;
      case 'X': out.push_back(Pauli::X); break;
      case 'Y': out.push_back(Pauli::Y); break;
      case 'Z': out.push_back(Pauli::Z); break;
      default:
        throw Error(ErrorCode::invalid_argument, std::string("unknown Pauli symbol '") + ch + "'");
    }
  }
  return out;
}

DensityMatrix ginibre_random_state(int dim, int rank, std::uint64_t seed) {
  if (dim < 1) throw Error(ErrorCode::shape, "ginibre_random_state: dimension must be >= 1");
  if (rank < 1 || rank > dim)
    throw Error(ErrorCode::invalid_rank, "ginibre_random_state: rank " + std::to_string(rank) +
                                             " outside [1, " + std::to_string(dim) + "]");
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(2.0);
  CMatrix g(dim, rank);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < rank; ++c) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(r, c) = Complex(re * scale, im * scale);
    }
  }
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = hermitian_part(rho);
  for (int i = 0; i < dim; ++i) rho(i, i) = Complex(rho(i, i).real(), 0.0);
  return DensityMatrix::from_matrix(std::move(rho));
}

CMatrix psd_sqrt(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(h));
  const RVector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().adjoint();
}

RVector hermitian_eigenvalues_desc(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(h), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().reverse();
}

int numerical_rank(const CMatrix& hermitian, double rel_tol) {
  const RVector ev = hermitian_eigenvalues_desc(hermitian);
  const double scale = ev.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0;
  return static_cast<int>((ev.array() > rel_tol * scale).count());
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(rho, sigma, "fidelity");
  const CMatrix root = psd_sqrt(rho.matrix());
  const CMatrix inner = root * sigma.matrix() * root;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(inner), Eigen::EigenvaluesOnly);
  const double tr = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(tr * tr, 0.0, 1.0);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require_same_dim(rho, sigma, "trace_distance");
  const CMatrix diff = rho.matrix() - sigma.matrix();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(diff), Eigen::EigenvaluesOnly);
  return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

HermitianObservable pauli_observable(std::span<const Pauli> labels) {
  if (labels.empty()) throw Error(ErrorCode::invalid_argument, "pauli_observable: empty label list");
  const Complex i(0.0, 1.0);
  auto single = [&](Pauli p) {
    Eigen::Matrix2cd m;
    switch (p) {
      case Pauli::I: m << 1.0, 0.0, 0.0, 1.0; break;
      case Pauli::X: m << 0.0, 1.0, 1.0, 0.0; break;
      case Pauli::Y: m << 0.0, -i, i, 0.0; break;
      case Pauli::Z: m << 1.0, 0.0, 0.0, -1.0; break;
    }
    return m;
  };
  CMatrix acc = single(labels[0]);
  std::string name(1, to_char(labels[0]));
  for (std::size_t k = 1; k < labels.size(); ++k) {
    const Eigen::Matrix2cd f = single(labels[k]);
    CMatrix next(acc.rows() * 2, acc.cols() * 2);
    for (Index r = 0; r < acc.rows(); ++r)
      for (Index c = 0; c < acc.cols(); ++c) next.block<2, 2>(2 * r, 2 * c) = acc(r, c) * f;
    acc = std::move(next);
    name.push_back(to_char(labels[k]));
  }
  return HermitianObservable(std::move(acc), std::move(name));
}

DensityMatrix project_to_physical(const CMatrix& h) {
  require_square(h, "project_to_physical");
  const Index dim = h.rows();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(h));
  const RVector clipped = eig.eigenvalues().cwiseMax(0.0);
  const double total = clipped.sum();
  CMatrix out;
  if (!(total > 0.0) || !std::isfinite(total)) {
    out = CMatrix::Identity(dim, dim) / static_cast<double>(dim);
  } else {
    out = eig.eigenvectors() * (clipped / total).asDiagonal() * eig.eigenvectors().adjoint();
    out = hermitian_part(out);
    for (Index k = 0; k < dim; ++k) out(k, k) = Complex(out(k, k).real(), 0.0);
    out /= out.trace().real();
  }
  return DensityMatrix::from_matrix(std::move(out));
}

}  // namespace aqst
