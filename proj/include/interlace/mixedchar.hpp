#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "interlace/config.hpp"
#include "interlace/errors.hpp"
#include "interlace/linalg.hpp"
#include "interlace/realstable.hpp"
#include "interlace/unipoly.hpp"

namespace interlace {

enum class MixedCharMethod { Interpolation, InclusionExclusion };

inline const char* mixed_char_method_name(MixedCharMethod m) {
  switch (m) {
    case MixedCharMethod::Interpolation: return "interpolation";
    case MixedCharMethod::InclusionExclusion: return "rank-one inclusion-exclusion";
  }
  return "unknown";
}

struct MixedCharResult {
  RealPoly mu;                // monic, degree d
  std::vector<double> roots;  // descending
  MixedCharMethod method = MixedCharMethod::Interpolation;
  bool cross_checked = false;
  std::optional<double> bound;  // (1 + sqrt(eps))^2 when sum A_i = I
};

namespace detail {

// Applies prod_i (1 - d/dz_i) to q(z, z_1..z_m) and restricts z_i = 0.
inline RealPoly mu_from_tensor(MultiPoly q, int m) {
  for (int i = 1; i <= m; ++i) q = q.one_minus_partial(i);
  for (int i = m; i >= 1; --i) q = q.restrict_var(i, 0.0);
  return q.to_univariate();
}

// mu(z) = sum_{T subset [m]} (-1)^|T| 2^{m-|T|} det(zI + sum_{i in T} A_i),
// valid when every A_i has rank <= 1 (multilinearity of the determinant).
inline RealPoly mu_rank_one_closed_form(const PSDSystem& S) {
  const int m = S.count();
  const int d = S.dim;
  RealPoly acc;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    ComplexMatrix B = ComplexMatrix::Zero(d, d);
    int bits = 0;
    for (int i = 0; i < m; ++i) {
      if (mask >> i & 1) {
        B += S.matrices[static_cast<std::size_t>(i)];
        ++bits;
      }
    }
    // det(zI + B) is monic with roots at the negated eigenvalues of B.
    auto lam = eigenvalues(B);
    for (double& l : lam) l = -l;
    const double w = (bits % 2 == 0 ? 1.0 : -1.0) * std::pow(2.0, m - bits);
    acc = acc + RealPoly::from_roots(lam).scaled(w);
  }
  return acc;
}

inline void make_monic(RealPoly& p, int expected_degree) {
  if (p.degree() != expected_degree)
    throw Error(ErrorCode::CrossCheckFailed,
                "mixed characteristic polynomial has unexpected degree");
  const double lead = p.leading();
  if (std::abs(lead - 1.0) > 1e-6)
    throw Error(ErrorCode::CrossCheckFailed,
                "mixed characteristic polynomial is not monic within tolerance");
  for (double& c : p.coeffs) c /= lead;
}

}  // namespace detail

// The mixed characteristic polynomial mu[A_1, ..., A_m]. The interpolation
// path is primary; for rank-one systems the inclusion-exclusion closed form
// runs as an independent cross-check (CrossCheckFailed if they disagree).
inline MixedCharResult mixed_char(const PSDSystem& S,
                                  const Budgets& budgets = default_budgets(),
                                  const Tolerances& tol = default_tolerances()) {
  const int m = S.count();
  const int d = S.dim;
  MixedCharResult out;

  if (m == 0) {
    std::vector<double> c(static_cast<std::size_t>(d) + 1, 0.0);
    c.back() = 1.0;
    out.mu = RealPoly(std::move(c));
  } else {
    std::optional<RealPoly> interp;
    try {
      interp = detail::mu_from_tensor(from_determinant(S, budgets.interpolation_evals, tol), m);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DimensionTooLarge) throw;
    }
    const bool fast_ok =
        S.all_rank_one && m < 62 && (std::int64_t{1} << m) <= budgets.subsets;
    if (interp && fast_ok) {
      RealPoly fast = detail::mu_rank_one_closed_form(S);
      const double scale = std::max({1.0, interp->max_abs_coeff(), fast.max_abs_coeff()});
      const std::size_t nc = std::max(interp->coeffs.size(), fast.coeffs.size());
      for (std::size_t k = 0; k < nc; ++k) {
        const double a = k < interp->coeffs.size() ? interp->coeffs[k] : 0.0;
        const double b = k < fast.coeffs.size() ? fast.coeffs[k] : 0.0;
        if (std::abs(a - b) > 1e-8 * scale)
          throw Error(ErrorCode::CrossCheckFailed,
                      "interpolation and inclusion-exclusion paths disagree");
      }
      out.mu = std::move(*interp);
      out.cross_checked = true;
    } else if (interp) {
      out.mu = std::move(*interp);
    } else if (fast_ok) {
      out.mu = detail::mu_rank_one_closed_form(S);
      out.method = MixedCharMethod::InclusionExclusion;
    } else {
      throw Error(ErrorCode::DimensionTooLarge,
                  "both mixed characteristic paths exceed their budgets");
    }
  }

  detail::make_monic(out.mu, d);
  out.roots = real_roots_tolerant(out.mu, tol.root);
  if (S.sum_is_identity) {
    const double eps = S.trace_bound;
    out.bound = (1.0 + std::sqrt(eps)) * (1.0 + std::sqrt(eps));
  }
  return out;
}

// Roots of mu, descending. NotRealRooted here signals a numerical or
// input-validation failure: PSD input guarantees real roots.
inline std::vector<double> mixed_real_rooted(const PSDSystem& S,
                                             const Budgets& budgets = default_budgets()) {
  return mixed_char(S, budgets).roots;
}

struct RootBoundResult {
  double largest_root = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - largest_root
  double epsilon = 0.0;
};

inline RootBoundResult mixed_root_bound(const PSDSystem& S,
                                        const Budgets& budgets = default_budgets()) {
  if (!S.sum_is_identity)
    throw Error(ErrorCode::PreconditionFailed, "system matrices must sum to the identity");
  const auto res = mixed_char(S, budgets);
  RootBoundResult out;
  out.epsilon = S.trace_bound;
  out.bound = *res.bound;
  out.largest_root = res.roots.empty() ? 0.0 : res.roots.front();
  out.margin = out.bound - out.largest_root;
  return out;
}

struct RankOneIdentityResult {
  RealPoly char_polynomial;  // p_A for A = sum A_i
  RealPoly mu;
  double deviation = 0.0;  // max |coeff difference|
};

inline RankOneIdentityResult rank_one_identity_check(
    const PSDSystem& S, const Budgets& budgets = default_budgets()) {
  if (!S.all_rank_one)
    throw Error(ErrorCode::NotRankOne, "system matrices must all have rank at most one");
  RankOneIdentityResult out;
  out.char_polynomial = char_poly(S.sum());
  out.mu = mixed_char(S, budgets).mu;
  const std::size_t nc = std::max(out.char_polynomial.coeffs.size(), out.mu.coeffs.size());
  for (std::size_t k = 0; k < nc; ++k) {
    const double a = k < out.char_polynomial.coeffs.size() ? out.char_polynomial.coeffs[k] : 0.0;
    const double b = k < out.mu.coeffs.size() ? out.mu.coeffs[k] : 0.0;
    out.deviation = std::max(out.deviation, std::abs(a - b));
  }
  return out;
}

// mu is affine in each matrix slot: replacing slot i by tA + (1-t)B must give
// the matching combination of the two replaced polynomials.
inline bool affine_in_each_argument_check(const PSDSystem& S, int i,
                                          const ComplexMatrix& A, const ComplexMatrix& B,
                                          double t,
                                          const Budgets& budgets = default_budgets()) {
  if (i < 0 || i >= S.count()) throw Error(ErrorCode::BadIndex, "slot index out of range");
  if (t < 0.0 || t > 1.0) throw Error(ErrorCode::BadInput, "t must lie in [0,1]");
  auto with_slot = [&](const ComplexMatrix& M) {
    std::vector<ComplexMatrix> ms = S.matrices;
    ms[static_cast<std::size_t>(i)] = M;
    return PSDSystem::validate(S.dim, std::move(ms));
  };
  const RealPoly mu_mix = mixed_char(with_slot(t * A + (1.0 - t) * B), budgets).mu;
  const RealPoly mu_a = mixed_char(with_slot(A), budgets).mu;
  const RealPoly mu_b = mixed_char(with_slot(B), budgets).mu;
  const RealPoly combo = mu_a.scaled(t) + mu_b.scaled(1.0 - t);
  const double scale = std::max({1.0, mu_mix.max_abs_coeff(), combo.max_abs_coeff()});
  const std::size_t nc = std::max(mu_mix.coeffs.size(), combo.coeffs.size());
  for (std::size_t k = 0; k < nc; ++k) {
    const double a = k < mu_mix.coeffs.size() ? mu_mix.coeffs[k] : 0.0;
    const double b = k < combo.coeffs.size() ? combo.coeffs[k] : 0.0;
    if (std::abs(a - b) > 1e-8 * scale) return false;
  }
  return true;
}

}  // namespace interlace
