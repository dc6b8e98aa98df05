#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "interlace/paving.hpp"
#include "support/generators.hpp"

using namespace interlace;

namespace {

ComplexMatrix flip2() {
  ComplexMatrix T(2, 2);
  T << 0, 1, 1, 0;
  return T;
}

ComplexMatrix half_ones2() {
  ComplexMatrix M(2, 2);
  M << 0.5, 0.5, 0.5, 0.5;
  return M;
}

void check_partitions(const PavingResult& res) {
  std::vector<int> seen(static_cast<std::size_t>(res.ambient), 0);
  for (const auto& blk : res.blocks)
    for (int u : blk) seen[static_cast<std::size_t>(u)]++;
  for (int c : seen) CHECK(c == 1);
}

}  // namespace

TEST_CASE("pave_projection on the half-ones projection") {
  auto res = pave_projection(half_ones2(), 2);
  REQUIRE(res.blocks.size() == 2);
  CHECK(res.blocks[0] == std::vector<int>{0});
  CHECK(res.blocks[1] == std::vector<int>{1});
  CHECK(res.block_norms[0] == Approx(0.5));
  CHECK(res.block_norms[1] == Approx(0.5));
  CHECK(res.bound == Approx(2.0));
  CHECK(res.certified);
  check_partitions(res);
}

TEST_CASE("pave_projection trivial projections") {
  for (int r : {1, 2, 3}) {
    auto res = pave_projection(ComplexMatrix::Identity(3, 3), r);
    const double want = (1.0 / std::sqrt(static_cast<double>(r)) + 1.0) *
                        (1.0 / std::sqrt(static_cast<double>(r)) + 1.0);
    CHECK(res.bound == Approx(want));
    for (double n : res.block_norms)
      if (n > 0.0) CHECK(n == Approx(1.0));
    CHECK(res.certified);
    check_partitions(res);
  }

  auto zero = pave_projection(ComplexMatrix::Zero(3, 3), 2);
  for (double n : zero.block_norms) CHECK(n == Approx(0.0).margin(1e-12));
  CHECK(zero.certified);
  check_partitions(zero);

  REQUIRE_THROWS_AS(pave_projection(flip2(), 2), Error);
}

TEST_CASE("dilate on hand examples") {
  // T^2 = I: the off-diagonal square-root blocks vanish.
  auto D = dilate(flip2());
  CHECK(spectral_norm(ComplexMatrix(D.projection.block(0, 0, 2, 2) - half_ones2())) <= 1e-12);
  ComplexMatrix lower(2, 2);
  lower << 0.5, -0.5, -0.5, 0.5;
  CHECK(spectral_norm(ComplexMatrix(D.projection.block(2, 2, 2, 2) - lower)) <= 1e-12);
  CHECK(spectral_norm(ComplexMatrix(D.projection.block(0, 2, 2, 2))) <= 1e-10);
  CHECK(D.idempotency_defect() <= 1e-8);
  CHECK(D.diag_defect() <= 1e-10);

  // T = 0: every block of the dilation is I/2.
  auto Dz = dilate(ComplexMatrix::Zero(2, 2));
  const ComplexMatrix half = 0.5 * ComplexMatrix::Identity(2, 2);
  for (int bi = 0; bi < 2; ++bi)
    for (int bj = 0; bj < 2; ++bj)
      CHECK(spectral_norm(ComplexMatrix(Dz.projection.block(2 * bi, 2 * bj, 2, 2) - half)) <=
            1e-12);
  CHECK(Dz.idempotency_defect() <= 1e-8);

  auto Di = dilate(ComplexMatrix::Identity(2, 2));
  CHECK(spectral_norm(ComplexMatrix(Di.projection.block(0, 0, 2, 2) -
                                    ComplexMatrix::Identity(2, 2))) <= 1e-7);
  CHECK(spectral_norm(ComplexMatrix(Di.projection.block(2, 2, 2, 2))) <= 1e-7);

  REQUIRE_THROWS_AS(dilate(2.0 * ComplexMatrix::Identity(2, 2)), Error);
  ComplexMatrix nonherm(2, 2);
  nonherm << 0, 1, 0, 0;
  REQUIRE_THROWS_AS(dilate(nonherm), Error);
}

TEST_CASE("dilation invariants on random contractions") {
  std::mt19937_64 rng(47);
  for (int it = 0; it < 60; ++it) {
    const int d = 1 + static_cast<int>(rng() % 8);
    ComplexMatrix T = testgen::random_zero_diag_hermitian(d, rng);
    const double n = spectral_norm(T);
    if (n > 1.0) T /= n * (1.0 + 1e-12);
    auto D = dilate(T);
    CHECK(D.idempotency_defect() <= 1e-8);
    CHECK(D.diag_defect() <= 1e-10);
  }
}

TEST_CASE("choose_r fixed points and tie handling") {
  auto lhs = [](int r) {
    const double s = 1.0 / std::sqrt(static_cast<double>(r)) + 1.0 / std::sqrt(2.0);
    return 2.0 * s * s - 1.0;
  };
  CHECK(choose_r(1.0) == 12);
  CHECK(lhs(11) > 1.0);
  CHECK(lhs(12) <= 1.0);

  CHECK(choose_r(0.5) == 40);
  CHECK(lhs(39) > 0.5);
  CHECK(lhs(40) <= 0.5);

  // Exact tie: 2 (2/sqrt 2)^2 - 1 = 3 at r = 2.
  CHECK(choose_r(3.0) == 2);
  CHECK(choose_r(0.99) == 12);
  CHECK(choose_r(10.0) == 1);
  REQUIRE_THROWS_AS(choose_r(0.0), Error);
  REQUIRE_THROWS_AS(choose_r(-1.0), Error);
}

TEST_CASE("pave_selfadjoint separates the flip matrix") {
  auto res = pave_selfadjoint(flip2(), 0.99);
  CHECK(res.r == 12);
  CHECK(res.blocks.size() == 144);
  check_partitions(res);
  for (double n : res.block_norms) CHECK(n <= 0.99 + 1e-9);
  CHECK(res.certified);
  // Index 0 and 1 always land in different blocks of a certified paving here:
  // any joint block would have norm 1.
  for (const auto& blk : res.blocks) CHECK(blk.size() <= 1);
}

TEST_CASE("pave_selfadjoint edge cases") {
  auto rz = pave_selfadjoint(ComplexMatrix::Zero(2, 2), 0.99);
  CHECK(rz.certified);
  for (double n : rz.block_norms) CHECK(n == Approx(0.0).margin(1e-12));
  check_partitions(rz);

  // Nonzero diagonal is allowed; the result reports honestly.
  ComplexMatrix T(2, 2);
  T << 0.1, 1.0, 1.0, 0.1;
  auto rd = pave_selfadjoint(T, 0.99);
  check_partitions(rd);
  CHECK(rd.operator_norm == Approx(1.1));
  for (std::size_t b = 0; b < rd.blocks.size(); ++b) {
    const double recomputed =
        detail::compression_norm(T, rd.blocks[b]);
    CHECK(rd.block_norms[b] == Approx(recomputed).margin(1e-12));
  }

  ComplexMatrix nonherm(2, 2);
  nonherm << 0, 1, 0, 0;
  REQUIRE_THROWS_AS(pave_selfadjoint(nonherm, 0.5), Error);
}

TEST_CASE("pave_selfadjoint satisfies the two-sided sandwich") {
  std::mt19937_64 rng(53);
  for (int it = 0; it < 12; ++it) {
    const int m = 2 + static_cast<int>(rng() % 2);
    const ComplexMatrix T = testgen::random_zero_diag_hermitian(m, rng);
    auto res = pave_selfadjoint(T, 0.99);
    REQUIRE(res.certified);
    check_partitions(res);
    const double eps_abs = 0.99 * spectral_norm(T);
    for (const auto& blk : res.blocks) {
      if (blk.empty()) continue;
      const ComplexMatrix sub = detail::principal_submatrix(T, blk);
      const ComplexMatrix lim =
          eps_abs * ComplexMatrix::Identity(static_cast<int>(blk.size()),
                                            static_cast<int>(blk.size()));
      CHECK(eigenvalues(ComplexMatrix(lim + sub)).back() >= -1e-9);
      CHECK(eigenvalues(ComplexMatrix(lim - sub)).back() >= -1e-9);
    }
  }
}

TEST_CASE("pave_general on hand examples") {
  // Hermitian with imaginary entries: A = T, B = 0.
  ComplexMatrix T(2, 2);
  T << std::complex<double>(0, 0), std::complex<double>(0, 1),
      std::complex<double>(0, -1), std::complex<double>(0, 0);
  auto res = pave_general(T, 0.99);
  check_partitions(res);
  CHECK(res.certified);
  for (double n : res.block_norms) CHECK(n <= 0.99 * res.operator_norm + 1e-9);

  // Strictly upper-triangular: 1x1 blocks are zero diagonal entries.
  ComplexMatrix U = ComplexMatrix::Zero(2, 2);
  U(0, 1) = std::complex<double>(1.0, 1.0) / std::sqrt(2.0);
  auto ru = pave_general(U, 0.99);
  check_partitions(ru);
  CHECK(ru.certified);

  auto rzero = pave_general(ComplexMatrix::Zero(2, 2), 0.99);
  CHECK(rzero.certified);
  check_partitions(rzero);

  ComplexMatrix diag = ComplexMatrix::Identity(2, 2);
  REQUIRE_THROWS_AS(pave_general(diag, 0.5), Error);
}

TEST_CASE("verify_paving recomputes norms from scratch") {
  std::mt19937_64 rng(59);
  const ComplexMatrix T = testgen::random_zero_diag_general(3, rng);
  auto res = pave_general(T, 0.99);
  auto rep = verify_paving(T, res.blocks, 0.99);
  CHECK(rep.pass);
  CHECK(rep.max_ratio <= 0.99 + 1e-9);

  // Single full block at a loose epsilon.
  auto full = verify_paving(T, {{0, 1, 2}}, 2.0);
  CHECK(full.pass);
  CHECK(full.max_ratio == Approx(1.0));

  REQUIRE_THROWS_AS(verify_paving(T, {{0, 1}, {1, 2}}, 0.5), Error);
  REQUIRE_THROWS_AS(verify_paving(T, {{0, 1}}, 0.5), Error);
  REQUIRE_THROWS_AS(verify_paving(T, {{0, 1, 2, 3}}, 0.5), Error);
}

TEST_CASE("projection paving bound holds on random projections") {
  std::mt19937_64 rng(61);
  for (int it = 0; it < 25; ++it) {
    const int d = 2 + static_cast<int>(rng() % 7);
    const int rank = 1 + static_cast<int>(rng() % std::min(4, d));
    const int r = 2 + static_cast<int>(rng() % 2);
    const ComplexMatrix P = testgen::random_projection(d, rank, rng);
    auto res = pave_projection(P, r);
    CHECK(res.certified);
    check_partitions(res);
    for (double n : res.block_norms) CHECK(n <= res.bound + 1e-9);
  }
}
