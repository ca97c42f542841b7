#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <map>

#include "btoep/symbol.hpp"
#include "test_support.hpp"

using namespace btoep;
using doctest::Approx;

TEST_CASE("parse fixes p and q from the nonzero extremes") {
  LaurentSymbol a = parse_symbol({{1, 1.0}, {-1, 1.0}});
  CHECK(a.p() == 1);
  CHECK(a.q() == 1);

  LaurentSymbol b = testing::quartic_symbol();
  CHECK(b.p() == 2);
  CHECK(b.q() == 2);
  CHECK(b.coeff(0) == cplx(0.0));

  // exact zero extremes are trimmed before p, q are fixed
  LaurentSymbol c = parse_symbol({{3, 0.0}, {1, 2.0}, {-1, 1.0}, {-4, 0.0}});
  CHECK(c.p() == 1);
  CHECK(c.q() == 1);
}

TEST_CASE("parse rejects invalid coefficient maps") {
  CHECK_THROWS_AS(parse_symbol({{2, 1.0}, {-2, 1.0}}), GcdViolation);
  CHECK_THROWS_AS(parse_symbol({{2, 1.0}, {0, 1.0}, {-2, 1.0}}), GcdViolation);
  CHECK_THROWS_AS(parse_symbol({{1, 1.0}, {0, 1.0}}), DegenerateRange);
  CHECK_THROWS_AS(parse_symbol({{-1, 1.0}, {0, 1.0}}), DegenerateRange);
  CHECK_THROWS_AS(parse_symbol(std::map<int, cplx>{{1, 0.0}, {-1, 0.0}}), ExtremeCoefficientZero);
}

TEST_CASE("evaluation and derivative") {
  LaurentSymbol a = testing::arcsine_symbol();
  CHECK(std::abs(a.evaluate(cplx(0.0, 1.0))) < 1e-15);          // i - i = 0
  CHECK(std::abs(a.derivative(cplx(1.0, 0.0))) < 1e-15);        // 1 - 1 = 0
  CHECK(a.evaluate(cplx(2.0, 0.0)).real() == Approx(2.5));

  LaurentSymbol ex1 = testing::cubic_symbol();
  CHECK(std::abs(ex1.evaluate(cplx(-1.0, 0.0))) < 1e-15);       // 4(z+1)^3/(27z) at z = -1
  CHECK(ex1.evaluate(cplx(2.0, 0.0)).real() == Approx(4.0 * 27.0 / (27.0 * 2.0)));

  CHECK_THROWS_AS(a.evaluate(cplx(0.0, 0.0)), ZeroArgument);
  CHECK_THROWS_AS(a.derivative(cplx(0.0, 0.0)), ZeroArgument);
}

TEST_CASE("evaluate agrees with the direct Fourier sum on the unit circle") {
  LaurentSymbol a = testing::quartic_symbol();
  auto rng = testing::fixed_rng(7u);
  std::uniform_real_distribution<double> u(0.0, 2.0 * pi);
  for (int trial = 0; trial < 200; ++trial) {
    double th = u(rng);
    cplx z(std::cos(th), std::sin(th));
    cplx direct = 0.0;
    for (int k = -a.q(); k <= a.p(); ++k) direct += a.coeff(k) * std::pow(z, k);
    CHECK(std::abs(a.evaluate(z) - direct) < 1e-12);
  }
}

TEST_CASE("derivative matches central differences") {
  LaurentSymbol a = testing::star_symbol();
  auto rng = testing::fixed_rng(11u);
  for (int trial = 0; trial < 50; ++trial) {
    cplx z = testing::random_disk_point(rng, 2.0);
    if (std::abs(z) < 0.3) continue;
    double h = 1e-6;
    cplx fd = (a.evaluate(z + h) - a.evaluate(z - h)) / (2.0 * h);
    CHECK(std::abs(a.derivative(z) - fd) < 1e-7 * (1.0 + std::abs(fd)));
  }
}

TEST_CASE("branch points of z + 1/z") {
  std::vector<cplx> bp = branch_points(testing::arcsine_symbol());
  REQUIRE(bp.size() == 2);
  CHECK(std::abs(bp[0] - cplx(-2.0)) < 1e-10);
  CHECK(std::abs(bp[1] - cplx(2.0)) < 1e-10);
}

TEST_CASE("branch points of 4(z+1)^3/(27z) are 0 (twice) and 1") {
  std::vector<cplx> bp = branch_points(testing::cubic_symbol());
  REQUIRE(bp.size() == 3);
  CHECK(std::abs(bp[0]) < 1e-9);
  CHECK(std::abs(bp[1]) < 1e-9);
  CHECK(std::abs(bp[2] - cplx(1.0)) < 1e-9);

  auto uniq = branch_points_unique(testing::cubic_symbol());
  REQUIRE(uniq.size() == 2);
  CHECK(uniq[0].second == 2);
  CHECK(uniq[1].second == 1);
}

TEST_CASE("branch points of z^2+z+1/z+1/z^2 are -9/4, 0, 4") {
  std::vector<cplx> bp = branch_points(testing::quartic_symbol());
  REQUIRE(bp.size() == 4);  // -9/4 carries multiplicity two
  CHECK(std::abs(bp[0] - cplx(-2.25)) < 1e-9);
  CHECK(std::abs(bp[1] - cplx(-2.25)) < 1e-9);
  CHECK(std::abs(bp[2]) < 1e-9);
  CHECK(std::abs(bp[3] - cplx(4.0)) < 1e-9);
}

TEST_CASE("branch point count and conjugation symmetry") {
  // random real symbols: p+q values, closed under conjugation
  auto rng = testing::fixed_rng(23u);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::map<int, cplx> spec;
    int p = 1 + trial % 3, q = 1 + (trial / 3) % 3;
    spec[p] = u(rng) + 2.5;
    spec[-q] = u(rng) + 2.5;
    for (int k = -q + 1; k < p; ++k)
      if (trial % 2 == 0 || k != 0) spec[k] = u(rng);
    LaurentSymbol a = parse_symbol(spec);
    std::vector<cplx> bp = branch_points(a);
    CHECK(static_cast<int>(bp.size()) == a.span());
    for (cplx b : bp) {
      double best = 1e300;
      for (cplx other : bp) best = std::min(best, std::abs(std::conj(b) - other));
      CHECK(best < 1e-10 * std::max(1.0, std::abs(b)));
    }
  }
}
