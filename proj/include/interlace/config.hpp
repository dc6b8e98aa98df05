#pragma once

#include <cstdint>

namespace interlace {

// Numerical tolerances used across the library. Every check that compares
// against one of these accepts an explicit override; these are the defaults.
struct Tolerances {
  double hermitian = 1e-10;     // |M - M*| relative to max(1, ||M||_F)
  double psd_clamp = 1e-8;      // eigenvalues above -psd_clamp are clamped to 0
  double root = 1e-7;           // imaginary-part acceptance in root extraction
  double projection = 1e-8;     // ||P^2 - P|| acceptance
  double interlace = 1e-8;      // absolute slack on root comparisons
  double sign_scale = 1e-10;    // sign checks: slack = sign_scale * max|coeff|
  double fd = 1e-5;             // finite-difference sign checks
  double stability = 1e-8;      // |p| acceptance in the stability falsifier
  double sum_identity = 1e-9;   // ||sum A_i - I|| flag threshold
  double rank = 1e-10;          // numeric rank cutoff, relative to max |eig|
};

struct Budgets {
  std::int64_t interpolation_evals = 1'000'000;  // determinant-grid evaluations
  std::int64_t enumeration = 10'000'000;         // assignments r^m
  std::int64_t subsets = 4096;                   // 2^m for the rank-one closed form
  int local_restarts = 100;                      // multi-restart local search
  std::int64_t local_moves = 1'000'000;          // objective evaluations, local search
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

inline const Budgets& default_budgets() {
  static const Budgets b{};
  return b;
}

}  // namespace interlace
