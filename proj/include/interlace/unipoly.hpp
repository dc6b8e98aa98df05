#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "interlace/config.hpp"
#include "interlace/errors.hpp"

namespace interlace {

inline constexpr int kMaxPolyDegree = 64;

// Univariate real polynomial p(z) = sum c_k z^k, coefficients ascending.
struct RealPoly {
  std::vector<double> coeffs;

  RealPoly() = default;
  explicit RealPoly(std::vector<double> c) : coeffs(std::move(c)) { trim(); }

  static RealPoly constant(double c) { return RealPoly({c}); }

  // Monic polynomial with the given roots.
  static RealPoly from_roots(const std::vector<double>& roots) {
    std::vector<double> c{1.0};
    for (double r : roots) {
      std::vector<double> next(c.size() + 1, 0.0);
      for (std::size_t k = 0; k < c.size(); ++k) {
        next[k + 1] += c[k];
        next[k] -= r * c[k];
      }
      c = std::move(next);
    }
    return RealPoly(std::move(c));
  }

  // Degree of the zero polynomial is -1.
  int degree() const {
    for (std::size_t k = coeffs.size(); k > 0; --k)
      if (coeffs[k - 1] != 0.0) return static_cast<int>(k - 1);
    return -1;
  }

  bool is_zero() const { return degree() < 0; }

  void trim() {
    while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  }

  double leading() const {
    int d = degree();
    return d < 0 ? 0.0 : coeffs[static_cast<std::size_t>(d)];
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (double c : coeffs) m = std::max(m, std::abs(c));
    return m;
  }

  double eval(double x) const {
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k > 0; --k) acc = acc * x + coeffs[k - 1];
    return acc;
  }

  std::complex<double> eval(std::complex<double> z) const {
    std::complex<double> acc = 0.0;
    for (std::size_t k = coeffs.size(); k > 0; --k) acc = acc * z + coeffs[k - 1];
    return acc;
  }

  RealPoly derivative() const {
    if (coeffs.size() <= 1) return RealPoly();
    std::vector<double> d(coeffs.size() - 1);
    for (std::size_t k = 1; k < coeffs.size(); ++k)
      d[k - 1] = coeffs[k] * static_cast<double>(k);
    return RealPoly(std::move(d));
  }

  RealPoly operator*(const RealPoly& q) const {
    if (is_zero() || q.is_zero()) return RealPoly();
    std::vector<double> c(coeffs.size() + q.coeffs.size() - 1, 0.0);
    for (std::size_t a = 0; a < coeffs.size(); ++a)
      for (std::size_t b = 0; b < q.coeffs.size(); ++b)
        c[a + b] += coeffs[a] * q.coeffs[b];
    return RealPoly(std::move(c));
  }

  RealPoly operator+(const RealPoly& q) const {
    std::vector<double> c(std::max(coeffs.size(), q.coeffs.size()), 0.0);
    for (std::size_t k = 0; k < coeffs.size(); ++k) c[k] += coeffs[k];
    for (std::size_t k = 0; k < q.coeffs.size(); ++k) c[k] += q.coeffs[k];
    return RealPoly(std::move(c));
  }

  RealPoly scaled(double s) const {
    std::vector<double> c = coeffs;
    for (double& x : c) x *= s;
    return RealPoly(std::move(c));
  }
};

namespace detail {

// Parlett-Reinsch balancing: diagonal similarity by powers of 2, reduces the
// norm imbalance of rows/columns before the QR eigensolve.
inline void balance_in_place(Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  bool converging = true;
  while (converging) {
    converging = false;
    for (int i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(A(j, i));
        r += std::abs(A(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c > r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if (c + r < 0.95 * s) {
        converging = true;
        A.col(i) *= f;
        A.row(i) /= f;
      }
    }
  }
}

inline std::vector<std::complex<double>> companion_roots(
    const std::vector<double>& monic_coeffs) {
  const int n = static_cast<int>(monic_coeffs.size()) - 1;  // degree, leading == 1
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -monic_coeffs[static_cast<std::size_t>(i)];
  balance_in_place(C);
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> roots(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) roots[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return roots;
}

// Roots of a complex-coefficient polynomial (used by the stability falsifier).
inline std::vector<std::complex<double>> companion_roots_complex(
    std::vector<std::complex<double>> coeffs) {
  double maxc = 0.0;
  for (const auto& c : coeffs) maxc = std::max(maxc, std::abs(c));
  if (maxc == 0.0) return {};
  while (coeffs.size() > 1 && std::abs(coeffs.back()) <= 1e-14 * maxc) coeffs.pop_back();
  const int n = static_cast<int>(coeffs.size()) - 1;
  if (n < 1) return {};
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i)
    C(i, n - 1) = -coeffs[static_cast<std::size_t>(i)] / coeffs.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> roots(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) roots[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return roots;
}

// Deterministic uniform double in [0,1), independent of the standard library's
// distribution implementation.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// All real roots of p, sorted descending. Fails with NotRealRooted (carrying
// the offending value) if any companion eigenvalue has an imaginary part
// exceeding tol * (1 + |root|).
inline std::vector<double> real_roots(const RealPoly& p,
                                      double tol = default_tolerances().root) {
  const int n = p.degree();
  if (n < 0) throw Error(ErrorCode::ZeroPolynomial, "zero polynomial has every root");
  if (n == 0) return {};
  if (n > kMaxPolyDegree)
    throw Error(ErrorCode::DimensionTooLarge, "polynomial degree exceeds 64");
  std::vector<double> monic(p.coeffs.begin(), p.coeffs.begin() + n + 1);
  const double lead = monic.back();
  for (double& c : monic) c /= lead;
  auto croots = detail::companion_roots(monic);
  std::vector<double> roots;
  roots.reserve(croots.size());
  for (const auto& z : croots) {
    if (std::abs(z.imag()) > tol * (1.0 + std::abs(z)))
      throw NotRealRootedError(z, "root has nonzero imaginary part");
    roots.push_back(z.real());
  }
  std::sort(roots.begin(), roots.end(), std::greater<double>());
  return roots;
}

// Root extraction for polynomials that are real-rooted by construction but
// may carry multiple roots. A root of multiplicity k is determined only to
// O(eps^(1/k)), so an imaginary part beyond `tol` is still accepted when it
// sits inside the conditioning limit of its root cluster. Genuinely complex
// pairs (imaginary part above the cluster noise floor) are rejected.
inline std::vector<double> real_roots_tolerant(const RealPoly& p,
                                               double tol = default_tolerances().root) {
  const int n = p.degree();
  if (n < 0) throw Error(ErrorCode::ZeroPolynomial, "zero polynomial has every root");
  if (n == 0) return {};
  if (n > kMaxPolyDegree)
    throw Error(ErrorCode::DimensionTooLarge, "polynomial degree exceeds 64");
  std::vector<double> monic(p.coeffs.begin(), p.coeffs.begin() + n + 1);
  const double lead = monic.back();
  for (double& c : monic) c /= lead;
  const auto croots = detail::companion_roots(monic);
  std::vector<double> roots;
  roots.reserve(croots.size());
  for (const auto& z : croots) {
    const double im = std::abs(z.imag());
    if (im > tol * (1.0 + std::abs(z))) {
      int cluster = 0;
      for (const auto& w : croots)
        if (std::abs(w - z) <= 10.0 * im) ++cluster;
      const double noise =
          std::pow(1024.0 * n * 2.2e-16, 1.0 / cluster) * (1.0 + std::abs(z));
      if (im > noise)
        throw NotRealRootedError(z, "root has nonzero imaginary part");
    }
    roots.push_back(z.real());
  }
  std::sort(roots.begin(), roots.end(), std::greater<double>());
  return roots;
}

inline bool is_real_rooted(const RealPoly& p,
                           double tol = default_tolerances().root) {
  if (p.degree() <= 0) return !p.is_zero();
  try {
    real_roots(p, tol);
    return true;
  } catch (const Error&) {
    return false;
  }
}

// Family of same-degree polynomials (the candidates for a common interlacing).
struct PolyFamily {
  std::vector<RealPoly> members;

  PolyFamily() = default;
  explicit PolyFamily(std::vector<RealPoly> m) : members(std::move(m)) {
    if (members.empty())
      throw Error(ErrorCode::ShapeMismatch, "family must be nonempty");
    const int deg = members.front().degree();
    for (const auto& p : members)
      if (p.degree() != deg)
        throw Error(ErrorCode::ShapeMismatch, "family members must share one degree");
  }

  int degree() const { return members.front().degree(); }
  std::size_t size() const { return members.size(); }
};

enum class NiceFamilyReason {
  Nice,
  NonpositiveLeading,
  MemberNotRealRooted,
  InterlacingGap,
};

inline const char* nice_family_reason_name(NiceFamilyReason r) {
  switch (r) {
    case NiceFamilyReason::Nice: return "nice";
    case NiceFamilyReason::NonpositiveLeading: return "nonpositive-leading-coefficient";
    case NiceFamilyReason::MemberNotRealRooted: return "member-not-real-rooted";
    case NiceFamilyReason::InterlacingGap: return "interlacing-gap-violated";
  }
  return "unknown";
}

struct NiceFamilyVerdict {
  bool nice = false;
  NiceFamilyReason reason = NiceFamilyReason::Nice;
  explicit operator bool() const { return nice; }
};

// Checks the three conditions (positive leading coefficients, real roots,
// max of j-th roots <= min of (j-1)-th roots). Precondition failures return
// a reason code rather than throwing.
inline NiceFamilyVerdict is_nice_family(
    const PolyFamily& F, double interlace_tol = default_tolerances().interlace,
    double root_tol = default_tolerances().root) {
  for (const auto& p : F.members)
    if (p.leading() <= 0.0)
      return {false, NiceFamilyReason::NonpositiveLeading};
  std::vector<std::vector<double>> roots;
  roots.reserve(F.size());
  for (const auto& p : F.members) {
    try {
      roots.push_back(real_roots(p, root_tol));
    } catch (const Error&) {
      return {false, NiceFamilyReason::MemberNotRealRooted};
    }
  }
  const int n = F.degree();
  for (int j = 2; j <= n; ++j) {
    double max_j = -std::numeric_limits<double>::infinity();
    double min_jm1 = std::numeric_limits<double>::infinity();
    for (const auto& r : roots) {
      max_j = std::max(max_j, r[static_cast<std::size_t>(j - 1)]);
      min_jm1 = std::min(min_jm1, r[static_cast<std::size_t>(j - 2)]);
    }
    if (max_j > min_jm1 + interlace_tol)
      return {false, NiceFamilyReason::InterlacingGap};
  }
  return {true, NiceFamilyReason::Nice};
}

inline void require_weights(const PolyFamily& F, const std::vector<double>& w) {
  if (w.size() != F.size())
    throw Error(ErrorCode::BadWeights, "weight count must equal family size");
  double sum = 0.0;
  for (double x : w) {
    if (x < -1e-15) throw Error(ErrorCode::BadWeights, "weights must be nonnegative");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw Error(ErrorCode::BadWeights, "weights must sum to 1");
}

inline RealPoly convex_combo(const PolyFamily& F, const std::vector<double>& w) {
  require_weights(F, w);
  RealPoly acc;
  for (std::size_t i = 0; i < F.size(); ++i)
    acc = acc + F.members[i].scaled(w[i]);
  return acc;
}

// Searches for a convex combination with nonreal roots. Vertices and pairwise
// midpoints are tried first, then `trials` uniform simplex samples (sorted
// uniform spacings, seeded). Returns the first counterexample weights found.
inline std::optional<std::vector<double>> nice_family_falsifier(
    const PolyFamily& F, int trials, std::uint64_t seed,
    double root_tol = default_tolerances().root) {
  const std::size_t m = F.size();
  auto nonreal = [&](const std::vector<double>& w) {
    return !is_real_rooted(convex_combo(F, w), root_tol);
  };
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> w(m, 0.0);
    w[i] = 1.0;
    if (nonreal(w)) return w;
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      std::vector<double> w(m, 0.0);
      w[i] = 0.5;
      w[j] = 0.5;
      if (nonreal(w)) return w;
    }
  }
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    std::vector<double> cuts(m - 1);
    for (double& c : cuts) c = detail::uniform01(rng);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> w(m);
    double prev = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      w[i] = cuts[i] - prev;
      prev = cuts[i];
    }
    w[m - 1] = 1.0 - prev;
    if (nonreal(w)) return w;
  }
  return std::nullopt;
}

// min_i rho_j(f_i) <= rho_j(f) <= max_i rho_j(f_i) for the combination f.
inline bool root_bracket_check(const PolyFamily& F, const std::vector<double>& w,
                               double interlace_tol = default_tolerances().interlace,
                               double root_tol = default_tolerances().root) {
  const RealPoly f = convex_combo(F, w);
  const auto rf = real_roots(f, root_tol);
  std::vector<std::vector<double>> roots;
  roots.reserve(F.size());
  for (const auto& p : F.members) roots.push_back(real_roots(p, root_tol));
  for (std::size_t j = 0; j < rf.size(); ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& r : roots) {
      lo = std::min(lo, r[j]);
      hi = std::max(hi, r[j]);
    }
    if (rf[j] < lo - interlace_tol || rf[j] > hi + interlace_tol) return false;
  }
  return true;
}

// Points are passed ascending: (a_{n+1}, ..., a_1) with count degree+1.
// Checks (-1)^{j-1} p(a_j) >= -slack for j = 1..n+1.
inline bool sign_alternation_check(const RealPoly& p, const std::vector<double>& pts,
                                   double sign_scale = default_tolerances().sign_scale) {
  const int n = p.degree();
  if (n < 1) throw Error(ErrorCode::BadPoints, "polynomial must be nonconstant");
  if (static_cast<int>(pts.size()) != n + 1)
    throw Error(ErrorCode::BadPoints, "need degree+1 points");
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (!(pts[i] < pts[i + 1]))
      throw Error(ErrorCode::BadPoints, "points must be strictly increasing");
  const double slack = sign_scale * p.max_abs_coeff();
  for (int j = 1; j <= n + 1; ++j) {
    const double aj = pts[static_cast<std::size_t>(n + 1 - j)];
    const double v = (j % 2 == 1 ? 1.0 : -1.0) * p.eval(aj);
    if (v < -slack) return false;
  }
  return true;
}

// (-1)^k (d/dx)^k (p'/p)(x) > 0 for k = 0..kmax, via sum k!/(x-rho_i)^{k+1}.
inline bool log_derivative_signs(const RealPoly& p, double x, int kmax,
                                 double root_tol = default_tolerances().root) {
  const auto roots = real_roots(p, root_tol);
  // Strictness is enforced at the root-extraction accuracy: a point within
  // root noise of rho_1 cannot be certified as above it.
  if (!roots.empty() &&
      !(x > roots.front() + root_tol * (1.0 + std::abs(roots.front()))))
    throw Error(ErrorCode::PointNotAboveRoots, "x must exceed the largest root");
  for (int k = 0; k <= kmax; ++k) {
    double factorial = 1.0;
    for (int i = 2; i <= k; ++i) factorial *= i;
    double sum = 0.0;
    for (double r : roots) sum += factorial / std::pow(x - r, k + 1);
    if (!(sum > 0.0) && !roots.empty()) return false;
  }
  return true;
}

}  // namespace interlace
