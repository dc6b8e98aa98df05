// Acceptance suite: runs every certified property at its stated tolerance and
// prints one pass/fail line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "interlace/interlace.hpp"
#include "support/generators.hpp"

using namespace interlace;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const auto t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

double max_coeff_dev(const RealPoly& a, const RealPoly& b) {
  double dev = 0.0;
  const std::size_t n = std::max(a.coeffs.size(), b.coeffs.size());
  for (std::size_t k = 0; k < n; ++k) {
    const double x = k < a.coeffs.size() ? a.coeffs[k] : 0.0;
    const double y = k < b.coeffs.size() ? b.coeffs[k] : 0.0;
    dev = std::max(dev, std::abs(x - y));
  }
  return dev;
}

// ----- criterion 1: p_A = mu for rank-one systems ---------------------------

Outcome criterion_rank_one_identity() {
  const double start = now_seconds();
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int it = 0; it < 100; ++it) {
    const int d = 1 + static_cast<int>(rng() % 4);
    const int m = 1 + static_cast<int>(rng() % 6);
    std::vector<ComplexMatrix> A;
    for (int i = 0; i < m; ++i) {
      ComplexVector v = testgen::random_complex(d, 1, rng);
      v /= std::sqrt(static_cast<double>(d));
      A.push_back(testgen::unif(rng, 0.0, 1.5) * (v * v.adjoint()));
    }
    const auto S = PSDSystem::validate(d, std::move(A));
    if (!S.all_rank_one) return {false, "generator produced a higher-rank matrix"};
    worst = std::max(worst, rank_one_identity_check(S).deviation);
  }
  const double elapsed = now_seconds() - start;
  std::ostringstream os;
  os << "100 systems, max coefficient deviation " << worst << " (tol 1e-8), "
     << elapsed << " s (limit 30)";
  return {worst <= 1e-8 && elapsed < 30.0, os.str()};
}

// ----- criterion 2: closed forms for one and two matrices -------------------

Outcome criterion_closed_forms() {
  std::mt19937_64 rng(1002);
  double worst = 0.0;
  for (int it = 0; it < 50; ++it) {
    const int d = 1 + static_cast<int>(rng() % 4);
    ComplexMatrix A = testgen::random_psd(d, d, rng);
    A /= static_cast<double>(d);  // keep coefficients O(1)
    std::vector<double> c(static_cast<std::size_t>(d) + 1, 0.0);
    c[static_cast<std::size_t>(d)] = 1.0;
    c[static_cast<std::size_t>(d - 1)] = -A.trace().real();
    worst = std::max(worst, max_coeff_dev(mixed_char(PSDSystem::validate(d, {A})).mu,
                                          RealPoly(std::move(c))));
  }
  for (int it = 0; it < 50; ++it) {
    const int d = 1 + static_cast<int>(rng() % 4);
    ComplexMatrix A = testgen::random_psd(d, d, rng);
    ComplexMatrix B = testgen::random_psd(d, d, rng);
    A /= static_cast<double>(d);
    B /= static_cast<double>(d);
    std::vector<double> c(static_cast<std::size_t>(d) + 1, 0.0);
    c[static_cast<std::size_t>(d)] = 1.0;
    c[static_cast<std::size_t>(d - 1)] = -(A.trace().real() + B.trace().real());
    if (d >= 2)
      c[static_cast<std::size_t>(d - 2)] =
          A.trace().real() * B.trace().real() - (A * B).trace().real();
    worst = std::max(worst, max_coeff_dev(mixed_char(PSDSystem::validate(d, {A, B})).mu,
                                          RealPoly(std::move(c))));
  }
  std::ostringstream os;
  os << "50 one-matrix and 50 two-matrix instances, max deviation " << worst
     << " (tol 1e-10)";
  return {worst <= 1e-10, os.str()};
}

// ----- criterion 3: root bound (1 + sqrt eps)^2 -----------------------------

Outcome criterion_root_bound() {
  std::mt19937_64 rng(1003);
  double worst_margin = std::numeric_limits<double>::infinity();
  int runs = 0;
  for (double eps : {0.1, 0.25, 0.5}) {
    for (int it = 0; it < 100; ++it) {
      // Feasibility: traces sum to d, so m >= d / eps is forced.
      const int d = eps >= 0.5 ? 1 + static_cast<int>(rng() % 2) : 1;
      const int m = static_cast<int>(std::ceil(1.3 * d / eps));
      auto S = PSDSystem::validate(
          d, testgen::trace_capped_identity_decomposition(d, m, eps, rng));
      if (!S.sum_is_identity) return {false, "generator lost the identity sum"};
      if (S.trace_bound > eps) return {false, "generator exceeded the trace cap"};
      worst_margin = std::min(worst_margin, mixed_root_bound(S).margin);
      ++runs;
    }
  }
  std::ostringstream os;
  os << runs << " systems over eps in {0.1, 0.25, 0.5}, worst margin " << worst_margin
     << " (tol -1e-8)";
  return {worst_margin >= -1e-8, os.str()};
}

// ----- criteria 4 and 5: expectation theorem and root sandwich --------------

Outcome criterion_expectation_theorem() {
  const double start = now_seconds();
  std::mt19937_64 rng(1004);
  double worst = 0.0;
  for (int it = 0; it < 5; ++it) {
    auto base = PSDSystem::validate(
        2, testgen::rank_one_identity_decomposition(2, 4, rng));
    worst = std::max(worst, expectation_theorem_check(LiftedSystem(base, 2)));
  }
  const double elapsed = now_seconds() - start;
  std::ostringstream os;
  os << "d=2 m=4 r=2, 16-assignment averages on 5 instances, max deviation " << worst
     << " (tol 1e-8), " << elapsed << " s (limit 5)";
  return {worst <= 1e-8 && elapsed < 5.0, os.str()};
}

Outcome criterion_root_sandwich() {
  std::mt19937_64 rng(1004);  // same instances as criterion 4
  double worst_slack = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 5; ++it) {
    auto base = PSDSystem::validate(
        2, testgen::rank_one_identity_decomposition(2, 4, rng));
    const auto rs = root_sandwich_check(LiftedSystem(base, 2));
    worst_slack = std::min(worst_slack, rs.worst_slack);
    if (!rs.pass) return {false, "sandwich inequality violated"};
  }
  std::ostringstream os;
  os << "all j on the criterion-4 instances, worst slack " << worst_slack
     << " (tol -1e-8)";
  return {worst_slack >= -1e-8, os.str()};
}

// ----- criterion 6: partition bound (1/sqrt r + sqrt C)^2 -------------------

Outcome criterion_partition_bound() {
  std::mt19937_64 rng(1006);
  double worst_gap = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 100; ++it) {
    const int d = 1 + static_cast<int>(rng() % 3);
    const int m = std::max(d, 1 + static_cast<int>(rng() % 8));
    const int r = 2 + static_cast<int>(rng() % 2);
    auto S = PSDSystem::validate(
        d, testgen::rank_one_identity_decomposition(d, m, rng));
    const auto res = partition_search(S, r, SearchStrategy::Exhaustive, 100'000'000, 0);
    worst_gap = std::min(worst_gap, res.bound - res.objective);
    if (!res.certified) return {false, "exhaustive search missed the bound"};
  }
  std::ostringstream os;
  os << "100 exhaustive searches (d<=3, m<=8, r in {2,3}), worst bound-objective gap "
     << worst_gap << " (tol -1e-9)";
  return {worst_gap >= -1e-9, os.str()};
}

// ----- criterion 7: projection paving ----------------------------------------

Outcome criterion_projection_paving() {
  std::mt19937_64 rng(1007);
  double worst_gap = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const int d = 2 + static_cast<int>(rng() % 7);
    const int rank = 1 + static_cast<int>(rng() % std::min(4, d));
    const int r = 2 + static_cast<int>(rng() % 2);
    const ComplexMatrix P = testgen::random_projection(d, rank, rng);
    const auto res = pave_projection(P, r, SearchStrategy::Exhaustive, 100'000'000, 0);
    for (double n : res.block_norms) worst_gap = std::min(worst_gap, res.bound - n);
    if (!res.certified) return {false, "a block norm exceeded the bound"};
  }
  std::ostringstream os;
  os << "200 projections (d<=8, rank<=4, r in {2,3}), worst bound-norm gap " << worst_gap
     << " (tol -1e-9)";
  return {worst_gap >= -1e-9, os.str()};
}

// ----- criterion 8: self-adjoint paving end to end ---------------------------

Outcome criterion_selfadjoint_paving() {
  const double eps = 0.99;
  const int r = choose_r(eps);
  if (r != 12) return {false, "choose_r(0.99) != 12"};

  std::mt19937_64 rng(1008);
  double worst_gap = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 50; ++it) {
    const int m = 2 + static_cast<int>(rng() % 2);  // dilation size 2m <= 6
    const ComplexMatrix T = testgen::random_zero_diag_hermitian(m, rng);
    const auto res = pave_selfadjoint(T, eps, SearchStrategy::Exhaustive, 10'000'000, 0);
    const double bound = eps * spectral_norm(T);
    for (std::size_t b = 0; b < res.blocks.size(); ++b) {
      const double n = detail::compression_norm(T, res.blocks[b]);
      worst_gap = std::min(worst_gap, bound - n);
    }
    if (!res.certified) return {false, "exhaustive paving missed the bound"};
  }
  if (worst_gap < -1e-9) return {false, "block norm above 0.99 ||T||"};

  // Larger m: the local search must certify or flag honestly.
  int certified = 0, flagged = 0;
  for (int m : {4, 6, 8}) {
    const ComplexMatrix T = testgen::random_zero_diag_hermitian(m, rng);
    const auto res = pave_selfadjoint(T, eps, SearchStrategy::Local, 300'000, 7);
    const double bound = eps * spectral_norm(T);
    bool all_below = true;
    for (const auto& blk : res.blocks)
      if (detail::compression_norm(T, blk) > bound + 1e-9) all_below = false;
    if (res.certified != all_below) return {false, "certified flag is dishonest"};
    (res.certified ? certified : flagged)++;
  }
  std::ostringstream os;
  os << "50 exhaustive pavings (m<=3) worst gap " << worst_gap
     << "; local search m in {4,6,8}: " << certified << " certified, " << flagged
     << " honestly flagged";
  return {true, os.str()};
}

// ----- criterion 9: choose_r fixed points ------------------------------------

Outcome criterion_choose_r() {
  auto lhs = [](int r) {
    const double s = 1.0 / std::sqrt(static_cast<double>(r)) + 1.0 / std::sqrt(2.0);
    return 2.0 * s * s - 1.0;
  };
  const bool ok = choose_r(1.0) == 12 && lhs(11) > 1.0 && lhs(12) <= 1.0 &&
                  choose_r(0.5) == 40 && lhs(39) > 0.5 && lhs(40) <= 0.5;
  std::ostringstream os;
  os << "choose_r(1.0)=" << choose_r(1.0) << " with lhs(11)=" << lhs(11)
     << ", lhs(12)=" << lhs(12) << "; choose_r(0.5)=" << choose_r(0.5)
     << " with lhs(39)=" << lhs(39) << ", lhs(40)=" << lhs(40);
  return {ok, os.str()};
}

// ----- criterion 10: barrier suite -------------------------------------------

Outcome criterion_barrier_suite() {
  std::mt19937_64 rng(1010);
  for (int it = 0; it < 100; ++it) {
    const int d = 1 + static_cast<int>(rng() % 3);
    const int m = 1 + static_cast<int>(rng() % 4);
    std::vector<ComplexMatrix> A;
    for (int i = 0; i < m; ++i) A.push_back(testgen::random_psd(d, d, rng));
    const auto S = PSDSystem::validate(d, std::move(A));

    std::vector<double> x(static_cast<std::size_t>(m));
    for (auto& v : x) v = testgen::unif(rng, 0.6, 2.5);

    // Lemma: positive, nonincreasing, convex with alternating derivative signs.
    const int i = static_cast<int>(rng() % static_cast<std::uint64_t>(m));
    const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(m));
    if (!barrier_sign_check(S, x, i, j, 3, 0.0, 1e-5).pass())
      return {false, "sign check failed at instance " + std::to_string(it)};

    // Corollary: Phi decreases toward the upper-right orthant.
    std::vector<double> y = x;
    for (auto& v : y) v += testgen::unif(rng, 0.0, 2.0);
    for (int k = 0; k < m; ++k)
      if (barrier(S, y, k) > barrier(S, x, k) + 1e-10)
        return {false, "monotone decrease failed at instance " + std::to_string(it)};

    // Shift lemma: scale x until Phi^j <= 1/2, then delta = 2 qualifies.
    std::vector<double> xs = x;
    const double phi = barrier(S, xs, j);
    if (phi > 0.5)
      for (auto& v : xs) v *= phi / 0.5 + 1e-9;
    if (!barrier_shift_check(S, xs, j, 2.0, 1e-5))
      return {false, "shift inequality failed at instance " + std::to_string(it)};
  }
  return {true, "sign, monotonicity, and shift checks on 100 systems (fd_tol 1e-5)"};
}

// ----- criterion 11: CLI determinism -----------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Outcome criterion_cli_determinism(const std::string& cli) {
  if (cli.empty()) return {false, "CLI path not provided"};
  std::ofstream("acc_T.json") << R"({"dim": 3, "entries": [
    [[0,0],[0.4,0.1],[-0.3,0.2]],
    [[0.4,-0.1],[0,0],[0.5,0]],
    [[-0.3,-0.2],[0.5,0],[0,0]]]})";
  std::ofstream("acc_sys.json") << R"({"matrices": [
    {"dim": 2, "entries": [[[0.5,0],[0.5,0]],[[0.5,0],[0.5,0]]]},
    {"dim": 2, "entries": [[[0.5,0],[-0.5,0]],[[-0.5,0],[0.5,0]]]}]})";

  std::vector<std::string> outputs;
  for (const std::string threads : {"1", "2", "8"}) {
    for (int repeat = 0; repeat < 2; ++repeat) {
      const std::string out =
          "acc_out_" + threads + "_" + std::to_string(repeat) + ".json";
      const std::string cmd = cli + " pave --epsilon 0.99 --seed 42 --threads " +
                              threads + " --input acc_T.json --output " + out;
      if (std::system(cmd.c_str()) != 0) return {false, "pave run failed: " + cmd};
      outputs.push_back(out);
    }
  }
  const std::string reference = slurp(outputs.front());
  if (reference.empty()) return {false, "empty CLI output"};
  for (const auto& out : outputs)
    if (slurp(out) != reference) return {false, "pave outputs differ at " + out};

  std::vector<std::string> psearch;
  for (const std::string threads : {"1", "2", "8"}) {
    const std::string out = "acc_ps_" + threads + ".json";
    const std::string cmd = cli + " partition-search --r 2 --seed 42 --threads " +
                            threads + " --input acc_sys.json --output " + out;
    if (std::system(cmd.c_str()) != 0) return {false, "partition-search run failed"};
    psearch.push_back(out);
  }
  const std::string ps_ref = slurp(psearch.front());
  for (const auto& out : psearch)
    if (slurp(out) != ps_ref) return {false, "partition-search outputs differ"};

  return {true, "byte-identical pave and partition-search reports at 1, 2, 8 threads"};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli_path;
#ifdef INTERLACE_CLI_PATH
  cli_path = INTERLACE_CLI_PATH;
#endif
  for (int a = 1; a + 1 < argc; ++a)
    if (std::string(argv[a]) == "--cli") cli_path = argv[a + 1];

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria{
      {1, "rank-one identity p_A = mu", criterion_rank_one_identity},
      {2, "closed forms for one and two matrices", criterion_closed_forms},
      {3, "root bound (1+sqrt(eps))^2", criterion_root_bound},
      {4, "expectation of the characteristic polynomial", criterion_expectation_theorem},
      {5, "root sandwich around the expected-lift roots", criterion_root_sandwich},
      {6, "partition bound (1/sqrt(r)+sqrt(C))^2", criterion_partition_bound},
      {7, "projection paving bound", criterion_projection_paving},
      {8, "self-adjoint paving end to end", criterion_selfadjoint_paving},
      {9, "choose_r fixed points", criterion_choose_r},
      {10, "barrier suite", criterion_barrier_suite},
      {11, "CLI determinism across threads",
       [&] { return criterion_cli_determinism(cli_path); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %2d: %s: %s\n", out.pass ? "PASS" : "FAIL", c.id,
                c.name, out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
