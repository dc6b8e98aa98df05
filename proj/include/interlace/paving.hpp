#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "interlace/config.hpp"
#include "interlace/errors.hpp"
#include "interlace/linalg.hpp"
#include "interlace/partition.hpp"

namespace interlace {

struct PavingResult {
  int ambient = 0;                       // dimension of the paved operator
  std::vector<std::vector<int>> blocks;  // 0-based index sets, empty allowed
  std::vector<double> block_norms;       // ||Q T Q|| recomputed per block
  double bound = 0.0;                    // applicable right-hand side (absolute)
  double epsilon = 0.0;                  // requested epsilon (0 for projection paving)
  int r = 1;
  double operator_norm = 0.0;
  double max_ratio = 0.0;  // max block norm / operator norm
  bool certified = false;
  SearchStrategy strategy = SearchStrategy::Exhaustive;
  std::int64_t iterations = 0;
};

namespace detail {

inline ComplexMatrix principal_submatrix(const ComplexMatrix& T,
                                         const std::vector<int>& idx) {
  ComplexMatrix out(static_cast<Eigen::Index>(idx.size()),
                    static_cast<Eigen::Index>(idx.size()));
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b)
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          T(idx[a], idx[b]);
  return out;
}

inline double compression_norm(const ComplexMatrix& T, const std::vector<int>& idx) {
  if (idx.empty()) return 0.0;
  return spectral_norm(principal_submatrix(T, idx));
}

inline void finish_paving_result(PavingResult& res, const ComplexMatrix& T) {
  res.block_norms.clear();
  res.block_norms.reserve(res.blocks.size());
  res.max_ratio = 0.0;
  bool ok = true;
  for (const auto& blk : res.blocks) {
    const double n = compression_norm(T, blk);
    res.block_norms.push_back(n);
    if (res.operator_norm > 0.0) res.max_ratio = std::max(res.max_ratio, n / res.operator_norm);
    if (n > res.bound + 1e-9) ok = false;
  }
  res.certified = ok;
}

}  // namespace detail

// Paves an orthogonal projection: builds the rank-one decomposition
// A_i = <., P e_i> P e_i of the identity on range(P), delegates to
// partition_search, and certifies ||Q_j P Q_j|| <= (1/sqrt r + sqrt||diag P||)^2.
inline PavingResult pave_projection(const ComplexMatrix& P, int r,
                                    SearchStrategy strategy = SearchStrategy::Auto,
                                    std::int64_t budget = default_budgets().enumeration,
                                    std::uint64_t seed = 0, int threads = 1,
                                    const Tolerances& tol = default_tolerances()) {
  if (P.rows() != P.cols())
    throw Error(ErrorCode::ShapeMismatch, "matrix is not square");
  if (!is_projection(P, tol.projection))
    throw Error(ErrorCode::NotProjection, "matrix is not an orthogonal projection");
  if (r < 1) throw Error(ErrorCode::BadInput, "r must be at least 1");
  const int m = static_cast<int>(P.rows());

  double max_diag = 0.0;
  for (int i = 0; i < m; ++i) max_diag = std::max(max_diag, std::abs(P(i, i)));

  PavingResult res;
  res.ambient = m;
  res.r = r;
  res.operator_norm = spectral_norm(P);
  res.bound = (1.0 / std::sqrt(static_cast<double>(r)) + std::sqrt(max_diag)) *
              (1.0 / std::sqrt(static_cast<double>(r)) + std::sqrt(max_diag));

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(P);
  std::vector<int> range_cols;
  for (int k = 0; k < m; ++k)
    if (es.eigenvalues()(k) > 0.5) range_cols.push_back(k);
  const int rank = static_cast<int>(range_cols.size());

  if (rank == 0) {
    res.blocks.assign(static_cast<std::size_t>(r), {});
    for (int i = 0; i < m; ++i) res.blocks[0].push_back(i);
    res.strategy = strategy == SearchStrategy::Local ? SearchStrategy::Local
                                                     : SearchStrategy::Exhaustive;
    detail::finish_paving_result(res, P);
    return res;
  }

  ComplexMatrix U(m, rank);
  for (int k = 0; k < rank; ++k) U.col(k) = es.eigenvectors().col(range_cols[static_cast<std::size_t>(k)]);

  // w_i = U* e_i; A_i = w_i w_i*. Then sum_i A_i = U*U = I_rank exactly and
  // ||A_i|| = (U U*)_{ii}, the i-th diagonal entry of the projected P.
  std::vector<ComplexMatrix> A;
  A.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const ComplexVector w = U.adjoint().col(i);
    A.push_back(w * w.adjoint());
  }
  const PSDSystem S = PSDSystem::validate(rank, std::move(A), tol);
  const PartitionSearchResult search = partition_search(S, r, strategy, budget, seed, threads);

  res.blocks = search.best.blocks();
  res.strategy = search.strategy;
  res.iterations = search.iterations;
  detail::finish_paving_result(res, P);
  return res;
}

// The 2m x 2m orthogonal projection built from a self-adjoint contraction.
struct Dilation {
  ComplexMatrix source;      // T
  ComplexMatrix projection;  // P

  double idempotency_defect() const {
    return spectral_norm(projection * projection - projection);
  }

  // Largest deviation of a diagonal entry from 1/2 (zero when diag T = 0).
  double diag_defect() const {
    double d = 0.0;
    for (Eigen::Index i = 0; i < projection.rows(); ++i)
      d = std::max(d, std::abs(projection(i, i) - std::complex<double>(0.5, 0.0)));
    return d;
  }
};

inline Dilation dilate(const ComplexMatrix& T,
                       const Tolerances& tol = default_tolerances()) {
  if (T.rows() != T.cols())
    throw Error(ErrorCode::ShapeMismatch, "matrix is not square");
  if (!is_hermitian(T, tol.hermitian))
    throw Error(ErrorCode::NotSelfAdjoint, "dilation requires a self-adjoint matrix");
  const int m = static_cast<int>(T.rows());
  if (spectral_norm(T) > 1.0 + 1e-12)
    throw Error(ErrorCode::NotContraction, "dilation requires ||T|| <= 1");
  const ComplexMatrix I = ComplexMatrix::Identity(m, m);
  const ComplexMatrix S = sqrt_psd(I - T * T, 1e-10);
  ComplexMatrix P(2 * m, 2 * m);
  P.block(0, 0, m, m) = (I + T) / 2.0;
  P.block(0, m, m, m) = S / 2.0;
  P.block(m, 0, m, m) = S / 2.0;
  P.block(m, m, m, m) = (I - T) / 2.0;
  return Dilation{T, std::move(P)};
}

// Smallest r >= 1 with 2 (1/sqrt r + 1/sqrt 2)^2 - 1 <= epsilon. A relative
// 1e-12 slack keeps exact ties (e.g. epsilon = 3 at r = 2) on the admitting side.
inline int choose_r(double epsilon) {
  if (!(epsilon > 0.0))
    throw Error(ErrorCode::BadEpsilon, "epsilon must be positive");
  auto lhs = [](int r) {
    const double s = 1.0 / std::sqrt(static_cast<double>(r)) + 1.0 / std::sqrt(2.0);
    return 2.0 * s * s - 1.0;
  };
  auto admits = [&](int r) {
    return lhs(r) <= epsilon * (1.0 + 1e-12) + 1e-12;
  };
  const double root = std::sqrt((1.0 + epsilon) / 2.0) - 1.0 / std::sqrt(2.0);
  int r = root > 0.0 ? std::max(1, static_cast<int>(std::floor(1.0 / (root * root)))) : 1;
  while (!admits(r)) ++r;
  while (r > 1 && admits(r - 1)) --r;
  return r;
}

// Paving for self-adjoint T at relative accuracy epsilon: pave the dilation
// with r = choose_r(epsilon) blocks, split each block into its first-half and
// second-half index sets, and return the r^2 intersections. Nonzero input is
// rescaled to unit norm first so the certificate is relative to ||T||.
inline PavingResult pave_selfadjoint(const ComplexMatrix& T, double epsilon,
                                     SearchStrategy strategy = SearchStrategy::Auto,
                                     std::int64_t budget = default_budgets().enumeration,
                                     std::uint64_t seed = 0, int threads = 1,
                                     const Tolerances& tol = default_tolerances()) {
  if (T.rows() != T.cols())
    throw Error(ErrorCode::ShapeMismatch, "matrix is not square");
  if (!is_hermitian(T, tol.hermitian))
    throw Error(ErrorCode::NotSelfAdjoint, "matrix is not self-adjoint");
  const int m = static_cast<int>(T.rows());
  const int r = choose_r(epsilon);
  const double norm_T = spectral_norm(T);
  const ComplexMatrix Tn = norm_T > 0.0 ? ComplexMatrix(T / norm_T) : T;

  const Dilation D = dilate(Tn, tol);
  const PavingResult proj = pave_projection(D.projection, r, strategy, budget, seed,
                                            threads, tol);

  // Q_i from the first m dilation coordinates, Q'_j from the last m.
  std::vector<std::vector<int>> first(static_cast<std::size_t>(r));
  std::vector<std::vector<int>> second(static_cast<std::size_t>(r));
  for (int j = 0; j < r; ++j) {
    for (int u : proj.blocks[static_cast<std::size_t>(j)]) {
      if (u < m)
        first[static_cast<std::size_t>(j)].push_back(u);
      else
        second[static_cast<std::size_t>(j)].push_back(u - m);
    }
  }

  PavingResult res;
  res.ambient = m;
  res.r = r;
  res.epsilon = epsilon;
  res.operator_norm = norm_T;
  res.bound = epsilon * norm_T;
  res.strategy = proj.strategy;
  res.iterations = proj.iterations;
  res.blocks.reserve(static_cast<std::size_t>(r) * static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      std::vector<int> blk;
      std::set_intersection(first[static_cast<std::size_t>(i)].begin(),
                            first[static_cast<std::size_t>(i)].end(),
                            second[static_cast<std::size_t>(j)].begin(),
                            second[static_cast<std::size_t>(j)].end(),
                            std::back_inserter(blk));
      res.blocks.push_back(std::move(blk));
    }
  }
  detail::finish_paving_result(res, T);
  return res;
}

// General paving: T = A + iB with A, B self-adjoint, each paved at epsilon/2,
// block families intersected. Requires diag T = 0.
inline PavingResult pave_general(const ComplexMatrix& T, double epsilon,
                                 SearchStrategy strategy = SearchStrategy::Auto,
                                 std::int64_t budget = default_budgets().enumeration,
                                 std::uint64_t seed = 0, int threads = 1,
                                 const Tolerances& tol = default_tolerances()) {
  if (T.rows() != T.cols())
    throw Error(ErrorCode::ShapeMismatch, "matrix is not square");
  const int m = static_cast<int>(T.rows());
  const double norm_T = spectral_norm(T);
  for (int i = 0; i < m; ++i)
    if (std::abs(T(i, i)) > 1e-10 * norm_T)
      throw Error(ErrorCode::NonzeroDiagonal, "paving requires diag T = 0");

  const ComplexMatrix A = (T + T.adjoint()) / 2.0;
  const ComplexMatrix B = (T - T.adjoint()) / std::complex<double>(0.0, 2.0);
  const PavingResult pa = pave_selfadjoint(A, epsilon / 2.0, strategy, budget, seed, threads, tol);
  const PavingResult pb = pave_selfadjoint(B, epsilon / 2.0, strategy, budget, seed + 1, threads, tol);

  PavingResult res;
  res.ambient = m;
  res.r = std::max(pa.r, pb.r);
  res.epsilon = epsilon;
  res.operator_norm = norm_T;
  res.bound = epsilon * norm_T;
  res.strategy = pa.strategy;
  res.iterations = pa.iterations + pb.iterations;
  for (const auto& ba : pa.blocks) {
    if (ba.empty()) continue;
    for (const auto& bb : pb.blocks) {
      if (bb.empty()) continue;
      std::vector<int> blk;
      std::set_intersection(ba.begin(), ba.end(), bb.begin(), bb.end(),
                            std::back_inserter(blk));
      if (!blk.empty()) res.blocks.push_back(std::move(blk));
    }
  }
  if (res.blocks.empty()) res.blocks.push_back({});  // m = 0 edge
  detail::finish_paving_result(res, T);
  return res;
}

struct PavingVerifyReport {
  std::vector<double> block_norms;
  double operator_norm = 0.0;
  double max_ratio = 0.0;
  bool pass = false;
};

// Recomputes every ||Q T Q|| from scratch, independent of how the blocks were
// produced.
inline PavingVerifyReport verify_paving(const ComplexMatrix& T,
                                        const std::vector<std::vector<int>>& blocks,
                                        double epsilon) {
  if (T.rows() != T.cols())
    throw Error(ErrorCode::ShapeMismatch, "matrix is not square");
  const int m = static_cast<int>(T.rows());
  std::vector<int> seen(static_cast<std::size_t>(m), 0);
  for (const auto& blk : blocks) {
    for (int u : blk) {
      if (u < 0 || u >= m)
        throw Error(ErrorCode::BadPartition, "block index out of range");
      if (seen[static_cast<std::size_t>(u)]++)
        throw Error(ErrorCode::BadPartition, "blocks overlap");
    }
  }
  for (int u = 0; u < m; ++u)
    if (!seen[static_cast<std::size_t>(u)])
      throw Error(ErrorCode::BadPartition, "blocks do not cover every index");

  PavingVerifyReport rep;
  rep.operator_norm = spectral_norm(T);
  bool ok = true;
  for (const auto& blk : blocks) {
    const double n = detail::compression_norm(T, blk);
    rep.block_norms.push_back(n);
    if (rep.operator_norm > 0.0) rep.max_ratio = std::max(rep.max_ratio, n / rep.operator_norm);
    if (n > epsilon * rep.operator_norm + 1e-9) ok = false;
  }
  rep.pass = ok;
  return rep;
}

}  // namespace interlace
