#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <vector>

#include "interlace/errors.hpp"
#include "interlace/unipoly.hpp"

namespace interlace {

// Dense multivariate real polynomial. Coefficients live in a contiguous
// tensor indexed by exponent tuples; extent(v) = degree bound along v plus 1.
class MultiPoly {
 public:
  MultiPoly() = default;

  explicit MultiPoly(std::vector<int> extents) : extents_(std::move(extents)) {
    std::int64_t total = 1;
    strides_.resize(extents_.size());
    for (std::size_t v = 0; v < extents_.size(); ++v) {
      if (extents_[v] < 1) throw Error(ErrorCode::BadIndex, "extent must be positive");
      strides_[v] = total;
      total *= extents_[v];
    }
    coef_.assign(static_cast<std::size_t>(total), 0.0);
  }

  static MultiPoly constant(double c) {
    MultiPoly p(std::vector<int>{});
    p.coef_[0] = c;
    return p;
  }

  int nvars() const { return static_cast<int>(extents_.size()); }
  int extent(int v) const { return extents_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& extents() const { return extents_; }
  std::int64_t coefficient_count() const { return static_cast<std::int64_t>(coef_.size()); }

  double& at(const std::vector<int>& idx) { return coef_[offset(idx)]; }
  double at(const std::vector<int>& idx) const { return coef_[offset(idx)]; }

  std::vector<double>& raw() { return coef_; }
  const std::vector<double>& raw() const { return coef_; }

  double max_abs_coeff() const {
    double m = 0.0;
    for (double c : coef_) m = std::max(m, std::abs(c));
    return m;
  }

  bool is_zero(double tol = 0.0) const { return max_abs_coeff() <= tol; }

  std::complex<double> eval(const std::vector<std::complex<double>>& pt) const {
    check_point(pt.size());
    return eval_impl<std::complex<double>>(pt);
  }

  double eval(const std::vector<double>& pt) const {
    check_point(pt.size());
    return eval_impl<double>(pt);
  }

  // Upper bound on |p| at the point: sum |c_alpha| * prod |z_v|^alpha_v.
  double abs_eval(const std::vector<std::complex<double>>& pt) const {
    check_point(pt.size());
    std::vector<double> mags(pt.size());
    for (std::size_t v = 0; v < pt.size(); ++v) mags[v] = std::abs(pt[v]);
    double acc = 0.0;
    std::vector<int> idx(extents_.size(), 0);
    for (std::size_t flat = 0; flat < coef_.size(); ++flat) {
      double term = std::abs(coef_[flat]);
      if (term != 0.0)
        for (std::size_t v = 0; v < idx.size(); ++v)
          term *= std::pow(mags[v], idx[v]);
      acc += term;
      bump(idx);
    }
    return acc;
  }

  MultiPoly partial(int v) const {
    check_var(v);
    if (extents_[static_cast<std::size_t>(v)] == 1) {
      std::vector<int> ext = extents_;
      return MultiPoly(std::move(ext));  // derivative of a constant direction
    }
    std::vector<int> ext = extents_;
    ext[static_cast<std::size_t>(v)] -= 1;
    MultiPoly out(ext);
    std::vector<int> idx(extents_.size(), 0);
    for (std::size_t flat = 0; flat < coef_.size(); ++flat) {
      const int k = idx[static_cast<std::size_t>(v)];
      if (k >= 1 && coef_[flat] != 0.0) {
        std::vector<int> j = idx;
        j[static_cast<std::size_t>(v)] = k - 1;
        out.at(j) += coef_[flat] * static_cast<double>(k);
      }
      bump(idx);
    }
    return out;
  }

  // Substitutes z_v := t and drops the variable.
  MultiPoly restrict_var(int v, double t) const {
    check_var(v);
    std::vector<int> ext;
    for (int u = 0; u < nvars(); ++u)
      if (u != v) ext.push_back(extents_[static_cast<std::size_t>(u)]);
    MultiPoly out(ext);
    std::vector<int> idx(extents_.size(), 0);
    for (std::size_t flat = 0; flat < coef_.size(); ++flat) {
      if (coef_[flat] != 0.0) {
        const int k = idx[static_cast<std::size_t>(v)];
        std::vector<int> j;
        j.reserve(ext.size());
        for (int u = 0; u < nvars(); ++u)
          if (u != v) j.push_back(idx[static_cast<std::size_t>(u)]);
        out.at(j) += coef_[flat] * std::pow(t, k);
      }
      bump(idx);
    }
    return out;
  }

  MultiPoly one_minus_partial(int v) const {
    check_var(v);
    const MultiPoly d = partial(v);
    MultiPoly out = *this;
    std::vector<int> idx(d.extents_.size(), 0);
    for (std::size_t flat = 0; flat < d.coef_.size(); ++flat) {
      if (d.coef_[flat] != 0.0) out.at(idx) -= d.coef_[flat];
      d.bump(idx);
    }
    return out;
  }

  // Coefficients of the univariate polynomial in z_v obtained by fixing every
  // other coordinate at the given values (values indexed by original variable,
  // the entry at position v is ignored).
  std::vector<std::complex<double>> coeffs_along(
      int v, const std::vector<std::complex<double>>& others) const {
    check_var(v);
    check_point(others.size());
    std::vector<std::complex<double>> out(
        static_cast<std::size_t>(extents_[static_cast<std::size_t>(v)]), 0.0);
    std::vector<int> idx(extents_.size(), 0);
    for (std::size_t flat = 0; flat < coef_.size(); ++flat) {
      if (coef_[flat] != 0.0) {
        std::complex<double> term = coef_[flat];
        for (int u = 0; u < nvars(); ++u) {
          if (u == v) continue;
          const int k = idx[static_cast<std::size_t>(u)];
          for (int e = 0; e < k; ++e) term *= others[static_cast<std::size_t>(u)];
        }
        out[static_cast<std::size_t>(idx[static_cast<std::size_t>(v)])] += term;
      }
      bump(idx);
    }
    return out;
  }

  RealPoly to_univariate() const {
    if (nvars() != 1)
      throw Error(ErrorCode::BadIndex, "polynomial is not univariate");
    return RealPoly(std::vector<double>(coef_.begin(), coef_.end()));
  }

 private:
  template <typename Scalar>
  Scalar eval_impl(const std::vector<Scalar>& pt) const {
    // Horner collapse, last axis innermost.
    std::vector<Scalar> values(coef_.begin(), coef_.end());
    std::int64_t len = static_cast<std::int64_t>(coef_.size());
    for (int v = nvars() - 1; v >= 0; --v) {
      const int e = extents_[static_cast<std::size_t>(v)];
      const std::int64_t stride = strides_[static_cast<std::size_t>(v)];
      const std::int64_t blocks = len / (stride * e);
      std::vector<Scalar> next(static_cast<std::size_t>(stride * blocks));
      for (std::int64_t b = 0; b < blocks; ++b) {
        for (std::int64_t s = 0; s < stride; ++s) {
          Scalar acc = 0.0;
          for (int k = e - 1; k >= 0; --k)
            acc = acc * pt[static_cast<std::size_t>(v)] +
                  values[static_cast<std::size_t>(b * stride * e + k * stride + s)];
          next[static_cast<std::size_t>(b * stride + s)] = acc;
        }
      }
      values = std::move(next);
      len = static_cast<std::int64_t>(values.size());
    }
    return values[0];
  }

  std::size_t offset(const std::vector<int>& idx) const {
    std::int64_t o = 0;
    for (std::size_t v = 0; v < extents_.size(); ++v) {
      if (idx[v] < 0 || idx[v] >= extents_[v])
        throw Error(ErrorCode::BadIndex, "exponent outside tensor extents");
      o += strides_[v] * idx[v];
    }
    return static_cast<std::size_t>(o);
  }

  void bump(std::vector<int>& idx) const {
    for (std::size_t v = 0; v < idx.size(); ++v) {
      if (++idx[v] < extents_[v]) return;
      idx[v] = 0;
    }
  }

  void check_var(int v) const {
    if (v < 0 || v >= nvars())
      throw Error(ErrorCode::BadIndex, "variable index out of range");
  }

  void check_point(std::size_t n) const {
    if (n != extents_.size())
      throw Error(ErrorCode::BadIndex, "point dimension mismatch");
  }

  std::vector<int> extents_;
  std::vector<std::int64_t> strides_;
  std::vector<double> coef_;
};

}  // namespace interlace
