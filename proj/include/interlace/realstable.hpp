#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "interlace/config.hpp"
#include "interlace/errors.hpp"
#include "interlace/linalg.hpp"
#include "interlace/multipoly.hpp"

namespace interlace {

// Validated tuple (A_1, ..., A_m) of PSD matrices with cached flags.
struct PSDSystem {
  int dim = 0;
  std::vector<ComplexMatrix> matrices;
  bool sum_is_identity = false;
  bool all_rank_one = false;
  double trace_bound = 0.0;  // epsilon = max_i Tr A_i
  double norm_bound = 0.0;   // C = max_i ||A_i||

  int count() const { return static_cast<int>(matrices.size()); }

  ComplexMatrix sum() const {
    ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
    for (const auto& A : matrices) s += A;
    return s;
  }

  // sum_i x_i A_i
  ComplexMatrix combine(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != count())
      throw Error(ErrorCode::ShapeMismatch, "coefficient count mismatch");
    ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < matrices.size(); ++i) s += x[i] * matrices[i];
    return s;
  }

  static PSDSystem validate(int dim, std::vector<ComplexMatrix> ms,
                            const Tolerances& tol = default_tolerances()) {
    if (dim < 1) throw Error(ErrorCode::ShapeMismatch, "dimension must be positive");
    PSDSystem s;
    s.dim = dim;
    for (const auto& A : ms) {
      if (A.rows() != dim || A.cols() != dim)
        throw Error(ErrorCode::ShapeMismatch, "matrix dimension mismatch");
      require_hermitian(A, tol.hermitian);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(A, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -tol.psd_clamp)
        throw Error(ErrorCode::NotPSD, "system matrix is not PSD within tolerance");
      s.trace_bound = std::max(s.trace_bound, A.trace().real());
      s.norm_bound = std::max(s.norm_bound, std::abs(es.eigenvalues().cwiseAbs().maxCoeff()));
    }
    s.matrices = std::move(ms);
    s.sum_is_identity =
        spectral_norm(s.sum() - ComplexMatrix::Identity(dim, dim)) <= tol.sum_identity;
    s.all_rank_one = true;
    for (const auto& A : s.matrices)
      if (numeric_rank(A, tol.rank) > 1) s.all_rank_one = false;
    return s;
  }
};

namespace detail {

// Inverse of the Vandermonde at integer nodes 0..e-1, via the Lagrange basis:
// column i holds the coefficients of prod_{k != i} (x - k) / (i - k). The
// numerator coefficients are exact integers, so each entry costs one division.
inline std::vector<long double> lagrange_inverse(int e) {
  std::vector<long double> Vinv(static_cast<std::size_t>(e) * e, 0.0L);
  for (int i = 0; i < e; ++i) {
    std::vector<long double> num{1.0L};
    long double denom = 1.0L;
    for (int k = 0; k < e; ++k) {
      if (k == i) continue;
      std::vector<long double> next(num.size() + 1, 0.0L);
      for (std::size_t a = 0; a < num.size(); ++a) {
        next[a + 1] += num[a];
        next[a] -= static_cast<long double>(k) * num[a];
      }
      num = std::move(next);
      denom *= static_cast<long double>(i - k);
    }
    for (int j = 0; j < e; ++j)
      Vinv[static_cast<std::size_t>(j) * e + static_cast<std::size_t>(i)] =
          num[static_cast<std::size_t>(j)] / denom;
  }
  return Vinv;
}

// Converts values-on-the-grid to coefficients along one tensor axis.
inline void values_to_coeffs_axis(std::vector<long double>& data,
                                  const std::vector<int>& extents, int axis) {
  const int e = extents[static_cast<std::size_t>(axis)];
  const auto Vinv = lagrange_inverse(e);
  std::int64_t stride = 1;
  for (int v = 0; v < axis; ++v) stride *= extents[static_cast<std::size_t>(v)];
  const std::int64_t total = static_cast<std::int64_t>(data.size());
  const std::int64_t blocks = total / (stride * e);
  std::vector<long double> line(static_cast<std::size_t>(e));
  for (std::int64_t b = 0; b < blocks; ++b) {
    for (std::int64_t s = 0; s < stride; ++s) {
      const std::int64_t base = b * stride * e + s;
      for (int k = 0; k < e; ++k)
        line[static_cast<std::size_t>(k)] = data[static_cast<std::size_t>(base + k * stride)];
      for (int j = 0; j < e; ++j) {
        long double acc = 0.0L;
        for (int k = 0; k < e; ++k)
          acc += Vinv[static_cast<std::size_t>(j) * e + static_cast<std::size_t>(k)] *
                 line[static_cast<std::size_t>(k)];
        data[static_cast<std::size_t>(base + j * stride)] = acc;
      }
    }
  }
}

}  // namespace detail

// Coefficient tensor of q(z, z_1, ..., z_m) = det(z I + sum z_i A_i),
// recovered by tensor-product Lagrange interpolation on integer nodes.
// Variable 0 is z; variable i is z_i. The node count along z_i is
// rank(A_i) + 1, which bounds the exact degree of det in z_i.
inline MultiPoly from_determinant(const PSDSystem& S,
                                  std::int64_t eval_budget =
                                      default_budgets().interpolation_evals,
                                  const Tolerances& tol = default_tolerances()) {
  const int d = S.dim;
  const int m = S.count();
  std::vector<int> extents(static_cast<std::size_t>(m) + 1);
  extents[0] = d + 1;
  for (int i = 0; i < m; ++i) {
    const int r = std::min(numeric_rank(S.matrices[static_cast<std::size_t>(i)], tol.rank), d);
    extents[static_cast<std::size_t>(i) + 1] = r + 1;
  }
  std::int64_t grid = 1;
  for (int e : extents) {
    grid *= e;
    if (grid > eval_budget)
      throw Error(ErrorCode::DimensionTooLarge,
                  "interpolation grid exceeds the evaluation budget");
  }

  // Extended precision throughout the grid evaluation and the transform:
  // the grid values grow like (node * ||A||)^d while the target coefficients
  // stay small, and double precision loses too much to that cancellation.
  using CLD = std::complex<long double>;
  using MatrixLD = Eigen::Matrix<CLD, Eigen::Dynamic, Eigen::Dynamic>;
  MatrixLD I = MatrixLD::Zero(d, d);
  for (int i = 0; i < d; ++i) I(i, i) = 1.0L;
  std::vector<MatrixLD> mats;
  mats.reserve(static_cast<std::size_t>(m));
  for (const auto& A : S.matrices) mats.push_back(A.cast<CLD>());

  std::vector<long double> values(static_cast<std::size_t>(grid), 0.0L);
  std::vector<int> idx(extents.size(), 0);
  for (std::int64_t flat = 0; flat < grid; ++flat) {
    MatrixLD M = static_cast<long double>(idx[0]) * I;
    for (int i = 0; i < m; ++i)
      M += static_cast<long double>(idx[static_cast<std::size_t>(i) + 1]) *
           mats[static_cast<std::size_t>(i)];
    values[static_cast<std::size_t>(flat)] = M.fullPivLu().determinant().real();
    for (std::size_t v = 0; v < idx.size(); ++v) {
      if (++idx[v] < extents[v]) break;
      idx[v] = 0;
    }
  }
  for (int v = 0; v <= m; ++v)
    detail::values_to_coeffs_axis(values, extents, v);

  MultiPoly q(extents);
  for (std::size_t k = 0; k < values.size(); ++k)
    q.raw()[k] = static_cast<double>(values[k]);
  return q;
}

// Samples the open upper half-space for a zero of p. One-sided: a returned
// point is a genuine counterexample to real stability, absence of one proves
// nothing. Strategy: fix all but one coordinate at random points of H, solve
// the remaining univariate polynomial exactly, and keep roots that land in H.
inline std::optional<std::vector<std::complex<double>>> stability_falsifier(
    const MultiPoly& p, std::int64_t samples, std::uint64_t seed,
    double stab_tol = default_tolerances().stability) {
  const int n = p.nvars();
  std::vector<int> eligible;
  for (int v = 0; v < n; ++v)
    if (p.extent(v) > 1) eligible.push_back(v);
  if (eligible.empty()) return std::nullopt;

  std::mt19937_64 rng(seed);
  const double coeff_scale = p.max_abs_coeff();
  for (std::int64_t s = 0; s < samples; ++s) {
    const int v = eligible[static_cast<std::size_t>(s % static_cast<std::int64_t>(eligible.size()))];
    std::vector<std::complex<double>> point(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
      if (u == v) continue;
      const double re = -3.0 + 6.0 * detail::uniform01(rng);
      const double im = 0.05 + 2.95 * detail::uniform01(rng);
      point[static_cast<std::size_t>(u)] = {re, im};
    }
    auto coeffs = p.coeffs_along(v, point);
    double cmax = 0.0;
    for (const auto& c : coeffs) cmax = std::max(cmax, std::abs(c));
    std::vector<std::complex<double>> candidates;
    if (cmax <= 1e-14 * std::max(1.0, coeff_scale)) {
      candidates.emplace_back(0.0, 1.0);  // slice vanishes identically
    } else {
      for (const auto& z : detail::companion_roots_complex(coeffs))
        if (z.imag() > 1e-8 * (1.0 + std::abs(z))) candidates.push_back(z);
    }
    for (const auto& z : candidates) {
      point[static_cast<std::size_t>(v)] = z;
      const double scale = std::max(1.0, p.abs_eval(point));
      if (std::abs(p.eval(point)) <= stab_tol * scale) return point;
    }
  }
  return std::nullopt;
}

// Barrier value via Jacobi's formula: Tr((sum x_i A_i)^{-1} A_j).
inline double barrier(const PSDSystem& S, const std::vector<double>& x, int j) {
  if (j < 0 || j >= S.count())
    throw Error(ErrorCode::BadIndex, "barrier index out of range");
  const ComplexMatrix M = S.combine(x);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(M, Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  const double lmin = es.eigenvalues().cwiseAbs().minCoeff();
  if (lmin <= 1e-12 * std::max(1.0, lmax))
    throw Error(ErrorCode::SingularPoint, "sum x_i A_i is singular at this point");
  return (M.fullPivLu().solve(S.matrices[static_cast<std::size_t>(j)])).trace().real();
}

enum class CheckVerdict { Pass, Fail, NotApplicable };

inline const char* check_verdict_name(CheckVerdict v) {
  switch (v) {
    case CheckVerdict::Pass: return "pass";
    case CheckVerdict::Fail: return "fail";
    case CheckVerdict::NotApplicable: return "not-applicable";
  }
  return "unknown";
}

struct BarrierReport {
  std::vector<double> x;
  int barrier_index = 0;    // i of Phi^i
  int ray_index = 0;        // j of the differentiation axis
  double value = 0.0;       // Phi^i(x)
  double grid_bound = 0.0;  // upper end of the orthant scan
  CheckVerdict positive = CheckVerdict::NotApplicable;
  std::vector<CheckVerdict> derivative_signs;          // k = 1..kmax along ray_index
  std::vector<CheckVerdict> nonincreasing_along_axis;  // one per coordinate ray
  std::vector<CheckVerdict> convex_along_axis;         // one per coordinate ray

  bool pass() const {
    auto ok = [](CheckVerdict v) { return v != CheckVerdict::Fail; };
    if (!ok(positive)) return false;
    for (auto v : derivative_signs)
      if (!ok(v)) return false;
    for (auto v : nonincreasing_along_axis)
      if (!ok(v)) return false;
    for (auto v : convex_along_axis)
      if (!ok(v)) return false;
    return true;
  }
};

namespace detail {

// k-th central finite difference of Phi^i along axis j, step h.
inline double barrier_fd(const PSDSystem& S, const std::vector<double>& x, int i,
                         int axis, int k, double h, double* stencil_max) {
  double acc = 0.0;
  double smax = 0.0;
  double binom = 1.0;
  for (int t = 0; t <= k; ++t) {
    std::vector<double> y = x;
    y[static_cast<std::size_t>(axis)] += (static_cast<double>(k) / 2.0 - t) * h;
    const double f = barrier(S, y, i);
    smax = std::max(smax, std::abs(f));
    acc += (t % 2 == 0 ? 1.0 : -1.0) * binom * f;
    binom = binom * (k - t) / (t + 1);
  }
  if (stencil_max) *stencil_max = smax;
  return acc / std::pow(h, k);
}

inline bool fd_sign_ok(double target_signed_value, double fd_tol, int k, double h,
                       double stencil_max) {
  // Noise floor of a k-th order central difference at double precision.
  const double floor_k =
      8.0 * std::pow(2.0, k) * 2.2e-16 * std::max(1.0, stencil_max) / std::pow(h, k);
  return target_signed_value >= -(fd_tol * std::max(1.0, std::abs(target_signed_value)) + floor_k);
}

}  // namespace detail

// Finite-difference certification of the alternating-sign property
// (-1)^k d^k/dz_j^k Phi^i >= 0, plus positivity/monotonicity/convexity
// verdicts along every coordinate ray. The zero-freeness precondition is
// scanned on a 5-point-per-axis grid over [x, x + 10(1+max|x|)].
inline BarrierReport barrier_sign_check(const PSDSystem& S, const std::vector<double>& x,
                                        int i, int j, int kmax, double h = 0.0,
                                        double fd_tol = default_tolerances().fd) {
  const int m = S.count();
  if (static_cast<int>(x.size()) != m)
    throw Error(ErrorCode::ShapeMismatch, "point dimension mismatch");
  if (i < 0 || i >= m || j < 0 || j >= m)
    throw Error(ErrorCode::BadIndex, "barrier index out of range");

  double xmax = 0.0;
  for (double v : x) xmax = std::max(xmax, std::abs(v));
  const double grid_bound = 10.0 * (1.0 + xmax);

  // Orthant positivity scan (heuristic precondition check): 5 points per
  // axis when the full grid is affordable, otherwise the diagonal ray. The
  // limit direction is covered by PSD-ness of sum A_i.
  auto require_pd = [&](const std::vector<double>& y) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(S.combine(y), Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 0.0))
      throw Error(ErrorCode::PreconditionUnverifiable,
                  "sum y_i A_i is not positive definite on the scanned orthant grid");
  };
  const int pts = 5;
  std::int64_t gtotal = 1;
  for (int v = 0; v < m && gtotal <= 100'000; ++v) gtotal *= pts;
  if (gtotal <= 100'000) {
    std::vector<int> gidx(static_cast<std::size_t>(m), 0);
    for (std::int64_t g = 0; g < gtotal; ++g) {
      std::vector<double> y = x;
      for (int v = 0; v < m; ++v)
        y[static_cast<std::size_t>(v)] +=
            grid_bound * static_cast<double>(gidx[static_cast<std::size_t>(v)]) / (pts - 1);
      require_pd(y);
      for (std::size_t v = 0; v < gidx.size(); ++v) {
        if (++gidx[v] < pts) break;
        gidx[v] = 0;
      }
    }
  } else {
    for (int g = 0; g < pts; ++g) {
      std::vector<double> y = x;
      for (double& v : y) v += grid_bound * static_cast<double>(g) / (pts - 1);
      require_pd(y);
    }
  }
  {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(S.sum(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -default_tolerances().psd_clamp)
      throw Error(ErrorCode::PreconditionUnverifiable,
                  "sum of the system matrices is not PSD in the limit direction");
  }

  BarrierReport rep;
  rep.x = x;
  rep.barrier_index = i;
  rep.ray_index = j;
  rep.grid_bound = grid_bound;
  rep.value = barrier(S, x, i);
  rep.positive = rep.value >= -1e-12 * std::max(1.0, std::abs(rep.value))
                     ? CheckVerdict::Pass
                     : CheckVerdict::Fail;

  const double hj =
      h > 0.0 ? h : 1e-4 * (1.0 + std::abs(x[static_cast<std::size_t>(j)]));
  for (int k = 1; k <= kmax; ++k) {
    double smax = 0.0;
    const double dk = detail::barrier_fd(S, x, i, j, k, hj, &smax);
    const double signed_value = (k % 2 == 0 ? 1.0 : -1.0) * dk;
    rep.derivative_signs.push_back(detail::fd_sign_ok(signed_value, fd_tol, k, hj, smax)
                                       ? CheckVerdict::Pass
                                       : CheckVerdict::Fail);
  }

  for (int a = 0; a < m; ++a) {
    const double ha = h > 0.0 ? h : 1e-4 * (1.0 + std::abs(x[static_cast<std::size_t>(a)]));
    double smax1 = 0.0, smax2 = 0.0;
    const double d1 = detail::barrier_fd(S, x, i, a, 1, ha, &smax1);
    const double d2 = detail::barrier_fd(S, x, i, a, 2, ha, &smax2);
    rep.nonincreasing_along_axis.push_back(
        detail::fd_sign_ok(-d1, fd_tol, 1, ha, smax1) ? CheckVerdict::Pass
                                                      : CheckVerdict::Fail);
    rep.convex_along_axis.push_back(detail::fd_sign_ok(d2, fd_tol, 2, ha, smax2)
                                        ? CheckVerdict::Pass
                                        : CheckVerdict::Fail);
  }
  return rep;
}

// Checks Phi^i_{(1-d_j)p}(x + delta e_j) <= Phi^i_p(x) for every i, where
// p = det(sum z_i A_i). The left side goes through the coefficient tensor,
// the right side through the trace formula.
inline bool barrier_shift_check(const PSDSystem& S, const std::vector<double>& x,
                                int j, double delta,
                                double fd_tol = default_tolerances().fd,
                                std::int64_t eval_budget =
                                    default_budgets().interpolation_evals) {
  const int m = S.count();
  if (j < 0 || j >= m) throw Error(ErrorCode::BadIndex, "index out of range");
  if (!(delta > 0.0))
    throw Error(ErrorCode::PreconditionFailed, "delta must be positive");
  const double phi_j = barrier(S, x, j);
  if (phi_j + 1.0 / delta > 1.0 + 1e-12)
    throw Error(ErrorCode::PreconditionFailed,
                "Phi^j(x) + 1/delta <= 1 does not hold");

  const MultiPoly q = from_determinant(S, eval_budget);
  const MultiPoly p = q.restrict_var(0, 0.0);  // variables are now z_1..z_m
  const MultiPoly r = p.one_minus_partial(j);
  std::vector<double> y = x;
  y[static_cast<std::size_t>(j)] += delta;
  const double ry = r.eval(y);
  for (int i = 0; i < m; ++i) {
    const double lhs = r.partial(i).eval(y) / ry;
    const double rhs = barrier(S, x, i);
    if (lhs > rhs + fd_tol * std::max(1.0, std::abs(rhs))) return false;
  }
  return true;
}

}  // namespace interlace
