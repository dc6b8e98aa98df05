#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include "interlace/config.hpp"
#include "interlace/errors.hpp"
#include "interlace/linalg.hpp"
#include "interlace/mixedchar.hpp"
#include "interlace/realstable.hpp"

namespace interlace {

// A point of the probability space {1, ..., r}^m: omega_i names the block
// index i joins. Labels are 1-based, matrix indices are 0-based.
struct Assignment {
  int m = 0;
  int r = 1;
  std::vector<int> omega;

  Assignment() = default;
  Assignment(int m_, int r_, std::vector<int> w) : m(m_), r(r_), omega(std::move(w)) {
    if (static_cast<int>(omega.size()) != m)
      throw Error(ErrorCode::ShapeMismatch, "assignment length mismatch");
    for (int w_i : omega)
      if (w_i < 1 || w_i > r)
        throw Error(ErrorCode::ShapeMismatch, "assignment label out of range");
  }

  // blocks()[j] holds the 0-based indices assigned to label j+1.
  std::vector<std::vector<int>> blocks() const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(r));
    for (int i = 0; i < m; ++i)
      out[static_cast<std::size_t>(omega[static_cast<std::size_t>(i)] - 1)].push_back(i);
    return out;
  }
};

inline std::int64_t assignments_count_capped(int m, int r, std::int64_t cap) {
  std::int64_t n = 1;
  for (int i = 0; i < m; ++i) {
    if (n > cap / r) return cap + 1;
    n *= r;
  }
  return n;
}

// Streams all r^m assignments in lexicographic order, each exactly once.
class AssignmentStream {
 public:
  AssignmentStream(int m, int r, std::int64_t budget = default_budgets().enumeration)
      : m_(m), r_(r) {
    if (m < 1 || r < 1) throw Error(ErrorCode::BadInput, "need m >= 1 and r >= 1");
    if (assignments_count_capped(m, r, budget) > budget)
      throw Error(ErrorCode::BudgetExceeded, "r^m exceeds the enumeration budget");
    omega_.assign(static_cast<std::size_t>(m), 1);
  }

  bool next(Assignment& out) {
    if (done_) return false;
    out = Assignment(m_, r_, omega_);
    for (int i = m_ - 1; i >= 0; --i) {
      if (++omega_[static_cast<std::size_t>(i)] <= r_) return true;
      omega_[static_cast<std::size_t>(i)] = 1;
    }
    done_ = true;
    return true;
  }

 private:
  int m_, r_;
  std::vector<int> omega_;
  bool done_ = false;
};

template <typename Fn>
inline void enumerate_assignments(int m, int r, Fn&& fn,
                                  std::int64_t budget = default_budgets().enumeration) {
  AssignmentStream stream(m, r, budget);
  Assignment a;
  while (stream.next(a)) fn(a);
}

// Base system lifted to r diagonal copies: carrier of the random matrices
// A_i(omega) = 0 + ... + r A_i + ... + 0.
struct LiftedSystem {
  PSDSystem base;
  int r = 1;

  LiftedSystem(PSDSystem b, int r_) : base(std::move(b)), r(r_) {
    if (r < 1) throw Error(ErrorCode::BadInput, "r must be at least 1");
  }

  int lifted_dim() const { return r * base.dim; }
};

// A(omega) = sum_i A_i(omega); block j equals r * sum_{omega_i = j} A_i.
inline ComplexMatrix lift(const LiftedSystem& L, const Assignment& omega) {
  if (omega.m != L.base.count() || omega.r != L.r)
    throw Error(ErrorCode::ShapeMismatch, "assignment does not match the lifted system");
  const int d = L.base.dim;
  ComplexMatrix out = ComplexMatrix::Zero(L.lifted_dim(), L.lifted_dim());
  for (int i = 0; i < omega.m; ++i) {
    const int pos = omega.omega[static_cast<std::size_t>(i)] - 1;
    out.block(pos * d, pos * d, d, d) +=
        static_cast<double>(L.r) * L.base.matrices[static_cast<std::size_t>(i)];
  }
  return out;
}

// E(A_i) = A_i + A_i + ... + A_i (r diagonal copies), one matrix per i.
inline std::vector<ComplexMatrix> expected_lift(const LiftedSystem& L) {
  const int d = L.base.dim;
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(L.base.count()));
  for (const auto& A : L.base.matrices) {
    ComplexMatrix E = ComplexMatrix::Zero(L.lifted_dim(), L.lifted_dim());
    for (int j = 0; j < L.r; ++j) E.block(j * d, j * d, d, d) = A;
    out.push_back(std::move(E));
  }
  return out;
}

inline PSDSystem expected_lift_system(const LiftedSystem& L) {
  return PSDSystem::validate(L.lifted_dim(), expected_lift(L));
}

// E(p_A) = mu[E(A_1), ..., E(A_m)]: averages char_poly(lift(omega)) over the
// uniform measure and compares with mu of the expected lifts. Returns the
// max coefficient deviation.
inline double expectation_theorem_check(const LiftedSystem& L,
                                        std::int64_t budget = default_budgets().enumeration,
                                        const Budgets& budgets = default_budgets()) {
  if (!L.base.all_rank_one)
    throw Error(ErrorCode::NotRankOne, "base system must be rank one");
  const int m = L.base.count();
  const int rd = L.lifted_dim();
  std::vector<double> avg(static_cast<std::size_t>(rd) + 1, 0.0);
  std::int64_t total = 0;
  enumerate_assignments(
      m, L.r,
      [&](const Assignment& w) {
        const RealPoly p = char_poly(lift(L, w));
        for (std::size_t k = 0; k < p.coeffs.size(); ++k) avg[k] += p.coeffs[k];
        ++total;
      },
      budget);
  for (double& c : avg) c /= static_cast<double>(total);

  const RealPoly mu = mixed_char(expected_lift_system(L), budgets).mu;
  double dev = 0.0;
  for (std::size_t k = 0; k < avg.size(); ++k) {
    const double b = k < mu.coeffs.size() ? mu.coeffs[k] : 0.0;
    dev = std::max(dev, std::abs(avg[k] - b));
  }
  return dev;
}

struct RootSandwichResult {
  std::vector<double> min_roots;  // min over omega of rho_j(p_{A(omega)})
  std::vector<double> mid_roots;  // rho_j of mu of the expected lifts
  std::vector<double> max_roots;
  bool pass = false;
  double worst_slack = 0.0;  // most negative margin observed
};

// min_omega rho_j <= rho_j(mu[E A]) <= max_omega rho_j, checked for all j
// (or one requested j) within the given slack.
inline RootSandwichResult root_sandwich_check(const LiftedSystem& L,
                                              std::optional<int> j_opt = std::nullopt,
                                              double slack = 1e-8,
                                              std::int64_t budget = default_budgets().enumeration,
                                              const Budgets& budgets = default_budgets()) {
  if (!L.base.all_rank_one)
    throw Error(ErrorCode::NotRankOne, "base system must be rank one");
  const int rd = L.lifted_dim();
  RootSandwichResult out;
  out.min_roots.assign(static_cast<std::size_t>(rd), std::numeric_limits<double>::infinity());
  out.max_roots.assign(static_cast<std::size_t>(rd), -std::numeric_limits<double>::infinity());
  enumerate_assignments(
      L.base.count(), L.r,
      [&](const Assignment& w) {
        const auto ev = eigenvalues(lift(L, w));  // descending == rho_j
        for (std::size_t k = 0; k < ev.size(); ++k) {
          out.min_roots[k] = std::min(out.min_roots[k], ev[k]);
          out.max_roots[k] = std::max(out.max_roots[k], ev[k]);
        }
      },
      budget);
  out.mid_roots = mixed_char(expected_lift_system(L), budgets).roots;

  out.pass = true;
  out.worst_slack = std::numeric_limits<double>::infinity();
  for (int j = 0; j < rd; ++j) {
    if (j_opt && *j_opt != j) continue;
    const auto k = static_cast<std::size_t>(j);
    const double lo = out.mid_roots[k] - out.min_roots[k];
    const double hi = out.max_roots[k] - out.mid_roots[k];
    out.worst_slack = std::min({out.worst_slack, lo, hi});
    if (lo < -slack || hi < -slack) out.pass = false;
  }
  return out;
}

enum class SearchStrategy { Exhaustive, Local, Auto };

inline const char* search_strategy_name(SearchStrategy s) {
  switch (s) {
    case SearchStrategy::Exhaustive: return "exhaustive";
    case SearchStrategy::Local: return "local";
    case SearchStrategy::Auto: return "auto";
  }
  return "unknown";
}

struct PartitionSearchResult {
  Assignment best;
  double objective = 0.0;  // max_j ||sum_{i in S_j} A_i||
  double bound = 0.0;      // (1/sqrt(r) + sqrt(C))^2
  std::vector<double> block_norms;
  SearchStrategy strategy = SearchStrategy::Exhaustive;
  std::int64_t iterations = 0;
  bool certified = false;  // objective <= bound + 1e-9
};

namespace detail {

inline double hermitian_norm(const ComplexMatrix& M) {
  if (M.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Block norms of an assignment, assembled in index order so repeated
// evaluations are bit-identical.
inline std::vector<double> canonical_block_norms(const std::vector<ComplexMatrix>& mats,
                                                 int d, const Assignment& w) {
  std::vector<ComplexMatrix> sums(static_cast<std::size_t>(w.r),
                                  ComplexMatrix::Zero(d, d));
  for (int i = 0; i < w.m; ++i)
    sums[static_cast<std::size_t>(w.omega[static_cast<std::size_t>(i)] - 1)] +=
        mats[static_cast<std::size_t>(i)];
  std::vector<double> norms(static_cast<std::size_t>(w.r), 0.0);
  for (int j = 0; j < w.r; ++j)
    norms[static_cast<std::size_t>(j)] = hermitian_norm(sums[static_cast<std::size_t>(j)]);
  return norms;
}

// Depth-first search over canonical label strings (omega_1 = 1, each new
// label is the next unused one). Every set partition into at most r blocks
// appears exactly once, at its lexicographically smallest labeling, so the
// first strict minimizer found equals the lexicographically smallest
// minimizer over the full space. Adding a PSD matrix never lowers a block
// norm, hence the running maximum prunes soundly.
struct ExhaustiveWorker {
  const std::vector<ComplexMatrix>* mats = nullptr;
  int m = 0, r = 0, d = 0;
  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<int> best_omega;
  std::int64_t leaves = 0;

  std::vector<ComplexMatrix> sums;
  std::vector<double> norms;
  std::vector<int> omega;

  void init(const std::vector<ComplexMatrix>& ms, int m_, int r_, int d_) {
    mats = &ms;
    m = m_;
    r = r_;
    d = d_;
    sums.assign(static_cast<std::size_t>(r), ComplexMatrix::Zero(d, d));
    norms.assign(static_cast<std::size_t>(r), 0.0);
    omega.assign(static_cast<std::size_t>(m), 0);
  }

  void dfs(int u, int used, double running_max) {
    if (running_max >= best_obj) return;
    if (u == m) {
      ++leaves;
      best_obj = running_max;
      best_omega = omega;
      return;
    }
    const int top = std::min(used + 1, r);
    for (int label = 1; label <= top; ++label) {
      const auto jb = static_cast<std::size_t>(label - 1);
      const ComplexMatrix saved = sums[jb];
      const double saved_norm = norms[jb];
      sums[jb] += (*mats)[static_cast<std::size_t>(u)];
      norms[jb] = hermitian_norm(sums[jb]);
      omega[static_cast<std::size_t>(u)] = label;
      dfs(u + 1, std::max(used, label), std::max(running_max, norms[jb]));
      sums[jb] = saved;
      norms[jb] = saved_norm;
    }
  }
};

// All canonical prefixes of the given depth, in lexicographic order.
inline std::vector<std::vector<int>> canonical_prefixes(int m, int r, int depth) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int used) -> void {
    if (static_cast<int>(cur.size()) == depth) {
      out.push_back(cur);
      return;
    }
    const int top = std::min(used + 1, r);
    for (int label = 1; label <= top; ++label) {
      cur.push_back(label);
      self(self, std::max(used, label));
      cur.pop_back();
    }
  };
  (void)m;
  rec(rec, 0);
  return out;
}

}  // namespace detail

// Finds a partition minimizing max_j ||sum_{i in S_j} A_i||. Exhaustive
// search returns the global minimizer (lexicographically smallest omega on
// ties) and is sharded deterministically across threads; local search is
// seeded steepest-descent with restarts and reports honestly whether the
// (1/sqrt(r) + sqrt(C))^2 bound was met.
inline PartitionSearchResult partition_search(const PSDSystem& S, int r,
                                              SearchStrategy strategy,
                                              std::int64_t budget,
                                              std::uint64_t seed,
                                              int threads = 1,
                                              const Budgets& budgets = default_budgets()) {
  if (!S.sum_is_identity)
    throw Error(ErrorCode::PreconditionFailed,
                "partition bound requires sum A_i = I");
  if (r < 1) throw Error(ErrorCode::BadInput, "r must be at least 1");
  const int m = S.count();
  if (m < 1) throw Error(ErrorCode::BadInput, "system must be nonempty");
  const double C = S.norm_bound;
  const double bound = (1.0 / std::sqrt(static_cast<double>(r)) + std::sqrt(C)) *
                       (1.0 / std::sqrt(static_cast<double>(r)) + std::sqrt(C));

  if (strategy == SearchStrategy::Auto)
    strategy = assignments_count_capped(m, r, budget) <= budget ? SearchStrategy::Exhaustive
                                                                : SearchStrategy::Local;

  PartitionSearchResult out;
  out.bound = bound;
  out.strategy = strategy;

  if (strategy == SearchStrategy::Exhaustive) {
    if (assignments_count_capped(m, r, budget) > budget)
      throw Error(ErrorCode::BudgetExceeded, "r^m exceeds the search budget");
    int depth = 0;
    auto prefixes = detail::canonical_prefixes(m, r, depth);
    while (depth < m && static_cast<int>(prefixes.size()) < 4 * std::max(1, threads) &&
           static_cast<int>(prefixes.size()) < 4096) {
      ++depth;
      prefixes = detail::canonical_prefixes(m, r, depth);
    }

    const int nthreads = std::max(1, threads);
    std::vector<detail::ExhaustiveWorker> workers(static_cast<std::size_t>(nthreads));
    auto run_worker = [&](int t) {
      auto& w = workers[static_cast<std::size_t>(t)];
      w.init(S.matrices, m, r, S.dim);
      for (std::size_t p = static_cast<std::size_t>(t); p < prefixes.size();
           p += static_cast<std::size_t>(nthreads)) {
        const auto& prefix = prefixes[p];
        // Replay the prefix, then search the subtree.
        double running_max = 0.0;
        int used = 0;
        for (std::size_t u = 0; u < prefix.size(); ++u) {
          const auto jb = static_cast<std::size_t>(prefix[u] - 1);
          w.sums[jb] += S.matrices[u];
          w.norms[jb] = detail::hermitian_norm(w.sums[jb]);
          w.omega[u] = prefix[u];
          used = std::max(used, prefix[u]);
          running_max = std::max(running_max, w.norms[jb]);
        }
        w.dfs(static_cast<int>(prefix.size()), used, running_max);
        for (auto& sum : w.sums) sum.setZero();
        std::fill(w.norms.begin(), w.norms.end(), 0.0);
      }
    };
    if (nthreads == 1) {
      run_worker(0);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(nthreads));
      for (int t = 0; t < nthreads; ++t) pool.emplace_back(run_worker, t);
      for (auto& th : pool) th.join();
    }

    double best_obj = std::numeric_limits<double>::infinity();
    std::vector<int> best_omega;
    for (const auto& w : workers) {
      if (w.best_omega.empty()) continue;
      if (w.best_obj < best_obj ||
          (w.best_obj == best_obj && w.best_omega < best_omega)) {
        best_obj = w.best_obj;
        best_omega = w.best_omega;
      }
    }
    out.best = Assignment(m, r, best_omega);
    // The certified space, not the pruned node count: the latter depends on
    // how shards carve the tree and would break run-to-run byte equality.
    out.iterations = assignments_count_capped(m, r, budget);
  } else {
    // Steepest-descent single-coordinate moves with seeded restarts.
    std::mt19937_64 rng(seed);
    double best_obj = std::numeric_limits<double>::infinity();
    std::vector<int> best_omega;
    std::int64_t evals = 0;
    bool met_bound = false;
    for (int restart = 0; restart < budgets.local_restarts && !met_bound; ++restart) {
      std::vector<int> omega(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i)
        omega[static_cast<std::size_t>(i)] =
            1 + static_cast<int>(rng() % static_cast<std::uint64_t>(r));
      std::vector<ComplexMatrix> sums(static_cast<std::size_t>(r),
                                      ComplexMatrix::Zero(S.dim, S.dim));
      std::vector<double> norms(static_cast<std::size_t>(r), 0.0);
      for (int i = 0; i < m; ++i)
        sums[static_cast<std::size_t>(omega[static_cast<std::size_t>(i)] - 1)] +=
            S.matrices[static_cast<std::size_t>(i)];
      for (int j = 0; j < r; ++j)
        norms[static_cast<std::size_t>(j)] =
            detail::hermitian_norm(sums[static_cast<std::size_t>(j)]);

      auto objective = [&]() {
        return *std::max_element(norms.begin(), norms.end());
      };
      double cur = objective();
      bool improved = true;
      while (improved && evals < budget) {
        improved = false;
        double move_obj = cur;
        int move_u = -1, move_label = -1;
        double move_from_norm = 0.0, move_to_norm = 0.0;
        for (int u = 0; u < m && evals < budget; ++u) {
          const int from = omega[static_cast<std::size_t>(u)];
          for (int label = 1; label <= r; ++label) {
            if (label == from) continue;
            ++evals;
            const double nf = detail::hermitian_norm(
                sums[static_cast<std::size_t>(from - 1)] -
                S.matrices[static_cast<std::size_t>(u)]);
            const double nt = detail::hermitian_norm(
                sums[static_cast<std::size_t>(label - 1)] +
                S.matrices[static_cast<std::size_t>(u)]);
            double cand = std::max(nf, nt);
            for (int j = 0; j < r; ++j)
              if (j != from - 1 && j != label - 1)
                cand = std::max(cand, norms[static_cast<std::size_t>(j)]);
            if (cand < move_obj) {
              move_obj = cand;
              move_u = u;
              move_label = label;
              move_from_norm = nf;
              move_to_norm = nt;
            }
          }
        }
        if (move_u >= 0) {
          const int from = omega[static_cast<std::size_t>(move_u)];
          sums[static_cast<std::size_t>(from - 1)] -=
              S.matrices[static_cast<std::size_t>(move_u)];
          sums[static_cast<std::size_t>(move_label - 1)] +=
              S.matrices[static_cast<std::size_t>(move_u)];
          norms[static_cast<std::size_t>(from - 1)] = move_from_norm;
          norms[static_cast<std::size_t>(move_label - 1)] = move_to_norm;
          omega[static_cast<std::size_t>(move_u)] = move_label;
          cur = move_obj;
          improved = true;
        }
      }
      // Indices carrying a zero matrix go to block 1 by convention.
      for (int i = 0; i < m; ++i)
        if (S.matrices[static_cast<std::size_t>(i)].cwiseAbs().maxCoeff() == 0.0)
          omega[static_cast<std::size_t>(i)] = 1;
      const auto canon = detail::canonical_block_norms(S.matrices, S.dim,
                                                       Assignment(m, r, omega));
      const double canon_obj = *std::max_element(canon.begin(), canon.end());
      if (canon_obj < best_obj || (canon_obj == best_obj && omega < best_omega)) {
        best_obj = canon_obj;
        best_omega = omega;
      }
      if (best_obj <= bound + 1e-9) met_bound = true;
      if (evals >= budget) break;
    }
    out.best = Assignment(m, r, best_omega);
    out.iterations = evals;
  }

  out.block_norms = detail::canonical_block_norms(S.matrices, S.dim, out.best);
  out.objective = *std::max_element(out.block_norms.begin(), out.block_norms.end());
  out.certified = out.objective <= out.bound + 1e-9;
  return out;
}

struct NormCorollaryResult {
  double min_norm = 0.0;  // min over omega of ||A(omega)||
  double bound = 0.0;     // (1 + sqrt(r * max Tr A_i))^2
  bool pass = false;
};

inline NormCorollaryResult norm_corollary_check(const LiftedSystem& L,
                                                std::int64_t budget =
                                                    default_budgets().enumeration) {
  if (!L.base.all_rank_one)
    throw Error(ErrorCode::NotRankOne, "base system must be rank one");
  if (!L.base.sum_is_identity)
    throw Error(ErrorCode::PreconditionFailed, "base system must sum to the identity");
  NormCorollaryResult out;
  const double eps = static_cast<double>(L.r) * L.base.trace_bound;
  out.bound = (1.0 + std::sqrt(eps)) * (1.0 + std::sqrt(eps));
  out.min_norm = std::numeric_limits<double>::infinity();
  enumerate_assignments(
      L.base.count(), L.r,
      [&](const Assignment& w) {
        out.min_norm = std::min(out.min_norm, detail::hermitian_norm(lift(L, w)));
      },
      budget);
  out.pass = out.min_norm <= out.bound + 1e-9;
  return out;
}

}  // namespace interlace
