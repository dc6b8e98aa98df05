#include <catch2/catch.hpp>

#include <complex>
#include <random>

#include "interlace/linalg.hpp"
#include "support/generators.hpp"

using namespace interlace;

namespace {

ComplexMatrix diag2(double a, double b) {
  ComplexMatrix M = ComplexMatrix::Zero(2, 2);
  M(0, 0) = a;
  M(1, 1) = b;
  return M;
}

ComplexMatrix half_ones2() {
  ComplexMatrix M(2, 2);
  M << 0.5, 0.5, 0.5, 0.5;
  return M;
}

}  // namespace

TEST_CASE("eigenvalues of diagonal and zero matrices") {
  auto ev = eigenvalues(diag2(1.0, 2.0));
  REQUIRE(ev.size() == 2);
  CHECK(ev[0] == Approx(2.0));
  CHECK(ev[1] == Approx(1.0));

  auto ez = eigenvalues(ComplexMatrix::Zero(3, 3));
  for (double v : ez) CHECK(v == Approx(0.0).margin(1e-14));
}

TEST_CASE("eigenvalues of the 2x2 flip match the hand-solved characteristic equation") {
  // Oracle: det(zI - M) = z^2 - 1 for M = [[0,1],[1,0]], roots +-1.
  ComplexMatrix M(2, 2);
  M << 0, 1, 1, 0;
  const double hand_plus = (0.0 + std::sqrt(0.0 + 4.0)) / 2.0;
  const double hand_minus = (0.0 - std::sqrt(0.0 + 4.0)) / 2.0;
  auto ev = eigenvalues(M);
  CHECK(ev[0] == Approx(hand_plus).margin(1e-12));
  CHECK(ev[1] == Approx(hand_minus).margin(1e-12));
}

TEST_CASE("eigenvalues rejects a non-Hermitian matrix") {
  ComplexMatrix M(2, 2);
  M << 0, 1, 0, 0;
  REQUIRE_THROWS_AS(eigenvalues(M), Error);
}

TEST_CASE("spectral norm basics") {
  CHECK(spectral_norm(ComplexMatrix::Identity(3, 3)) == Approx(1.0));
  CHECK(spectral_norm(diag2(-2.0, 1.0)) == Approx(2.0));
  // Rank-one projection: norm equals the single nonzero eigenvalue.
  CHECK(spectral_norm(half_ones2()) == Approx(1.0));
}

TEST_CASE("char_poly on small examples") {
  auto p = char_poly(diag2(1.0, 2.0));
  REQUIRE(p.coeffs == std::vector<double>{2.0, -3.0, 1.0});

  auto z = char_poly(ComplexMatrix::Zero(2, 2));
  REQUIRE(z.degree() == 2);
  CHECK(z.coeffs[0] == Approx(0.0).margin(1e-15));
  CHECK(z.coeffs[1] == Approx(0.0).margin(1e-15));
  CHECK(z.coeffs[2] == 1.0);

  // Direct 2x2 determinant: det(zI - P) = z^2 - z for the half-ones projection.
  auto q = char_poly(half_ones2());
  CHECK(q.coeffs[0] == Approx(0.0).margin(1e-12));
  CHECK(q.coeffs[1] == Approx(-1.0).margin(1e-12));
  CHECK(q.coeffs[2] == Approx(1.0));
}

TEST_CASE("psd, projection, rank, diag helpers") {
  CHECK(is_psd(diag2(0.0, 3.0)));
  CHECK_FALSE(is_psd(diag2(-1.0, 3.0)));

  // P^2 = P by hand for the half-ones matrix.
  CHECK(is_projection(half_ones2()));
  CHECK_FALSE(is_projection(diag2(0.5, 1.0)));

  ComplexMatrix e11 = ComplexMatrix::Zero(3, 3);
  e11(0, 0) = 1.0;
  CHECK(numeric_rank(e11) == 1);
  CHECK(numeric_rank(ComplexMatrix::Zero(3, 3)) == 0);

  auto d = diag_vector(diag2(1.0, 2.0));
  CHECK(d[0] == std::complex<double>(1.0, 0.0));
  CHECK(d[1] == std::complex<double>(2.0, 0.0));
}

TEST_CASE("sqrt_psd") {
  auto S = sqrt_psd(diag2(4.0, 9.0));
  CHECK(S(0, 0).real() == Approx(2.0));
  CHECK(S(1, 1).real() == Approx(3.0));

  REQUIRE_THROWS_AS(sqrt_psd(diag2(-1.0, 1.0)), Error);

  std::mt19937_64 rng(7);
  for (int it = 0; it < 25; ++it) {
    const int d = 1 + static_cast<int>(rng() % 6);
    const ComplexMatrix M = testgen::random_psd(d, d, rng);
    const ComplexMatrix S2 = sqrt_psd(M);
    CHECK(is_psd(S2));
    CHECK(spectral_norm(S2 * S2 - M) <=
          1e-8 * std::max(1.0, spectral_norm(M)));
  }
}

TEST_CASE("char_poly roots match eigenvalues for random Hermitian matrices") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 30; ++it) {
    const int d = 2 + static_cast<int>(rng() % 7);  // up to 8
    const ComplexMatrix M = testgen::random_hermitian(d, rng);
    const auto ev = eigenvalues(M);
    const auto roots = real_roots(char_poly(M), 1e-6);
    REQUIRE(roots.size() == ev.size());
    const double scale = std::max(1.0, spectral_norm(M));
    for (std::size_t k = 0; k < ev.size(); ++k)
      CHECK(std::abs(roots[k] - ev[k]) <= 1e-7 * scale);
  }
}

TEST_CASE("trace identity and unitary invariance of the spectral norm") {
  std::mt19937_64 rng(13);
  for (int it = 0; it < 30; ++it) {
    const int d = 1 + static_cast<int>(rng() % 8);
    const ComplexMatrix M = testgen::random_hermitian(d, rng);
    const auto ev = eigenvalues(M);
    double sum = 0.0;
    for (double v : ev) sum += v;
    const double tr = M.trace().real();
    CHECK(std::abs(sum - tr) <= 1e-9 * std::max(1.0, std::abs(tr)));

    const ComplexMatrix U = testgen::random_unitary(d, rng);
    CHECK(spectral_norm(U * M * U.adjoint()) ==
          Approx(spectral_norm(M)).margin(1e-10));
  }
}
