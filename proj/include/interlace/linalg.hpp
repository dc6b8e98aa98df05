#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <vector>

#include "interlace/config.hpp"
#include "interlace/errors.hpp"
#include "interlace/unipoly.hpp"

namespace interlace {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline double hermitian_defect(const ComplexMatrix& M) {
  return (M - M.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& M,
                         double tol = default_tolerances().hermitian) {
  if (M.rows() != M.cols()) return false;
  if (M.rows() == 0) return true;
  return hermitian_defect(M) <= tol * std::max(1.0, M.norm());
}

inline void require_hermitian(const ComplexMatrix& M,
                              double tol = default_tolerances().hermitian) {
  if (M.rows() != M.cols())
    throw Error(ErrorCode::ShapeMismatch, "matrix is not square");
  if (!is_hermitian(M, tol))
    throw Error(ErrorCode::NotHermitian, "matrix is not Hermitian within tolerance");
}

// Eigenvalues of a Hermitian matrix, sorted descending.
inline std::vector<double> eigenvalues(const ComplexMatrix& M,
                                       double tol = default_tolerances().hermitian) {
  require_hermitian(M, tol);
  if (M.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(M, Eigen::EigenvaluesOnly);
  std::vector<double> vals(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(vals.begin(), vals.end(), std::greater<double>());
  return vals;
}

// Largest singular value; equals max |eigenvalue| for Hermitian input.
inline double spectral_norm(const ComplexMatrix& M) {
  if (M.size() == 0) return 0.0;
  if (M.rows() == M.cols() && is_hermitian(M)) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(M, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(M);
  return svd.singularValues()(0);
}

// Monic characteristic polynomial det(zI - M), expanded from the spectrum.
inline RealPoly char_poly(const ComplexMatrix& M,
                          double tol = default_tolerances().hermitian) {
  return RealPoly::from_roots(eigenvalues(M, tol));
}

inline bool is_psd(const ComplexMatrix& M,
                   double tol = default_tolerances().psd_clamp) {
  if (!is_hermitian(M)) return false;
  if (M.rows() == 0) return true;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

inline bool is_projection(const ComplexMatrix& M,
                          double tol = default_tolerances().projection) {
  if (!is_hermitian(M)) return false;
  if (M.rows() == 0) return true;
  return spectral_norm(M * M - M) <= tol * std::max(1.0, spectral_norm(M));
}

inline int numeric_rank(const ComplexMatrix& M,
                        double tol = default_tolerances().rank) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<ComplexMatrix> svd(M);
  const auto& sv = svd.singularValues();
  const double cutoff = tol * std::max(1.0, sv(0));
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return rank;
}

inline std::vector<std::complex<double>> diag_vector(const ComplexMatrix& M) {
  if (M.rows() != M.cols())
    throw Error(ErrorCode::ShapeMismatch, "matrix is not square");
  std::vector<std::complex<double>> d(static_cast<std::size_t>(M.rows()));
  for (Eigen::Index i = 0; i < M.rows(); ++i) d[static_cast<std::size_t>(i)] = M(i, i);
  return d;
}

// Hermitian PSD square root. Eigenvalues in [-clamp_tol, 0) are clamped to 0.
inline ComplexMatrix sqrt_psd(const ComplexMatrix& M,
                              double clamp_tol = default_tolerances().psd_clamp) {
  require_hermitian(M);
  if (M.rows() == 0) return M;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(M);
  Eigen::VectorXd lam = es.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < -clamp_tol)
      throw Error(ErrorCode::NotPSD, "matrix has an eigenvalue below -psd_clamp_tol");
    lam(i) = std::sqrt(std::max(lam(i), 0.0));
  }
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

inline double trace_re(const ComplexMatrix& M) { return M.trace().real(); }

}  // namespace interlace
