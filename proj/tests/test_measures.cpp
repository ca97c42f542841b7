#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "btoep/measures.hpp"
#include "test_support.hpp"

using namespace btoep;
using doctest::Approx;

namespace {

// closed-form densities for a = 4(z+1)^3/(27 z) on (0,1) and (-inf, 0)
double cubic_rho0(double x) {
  double s = std::sqrt(1.0 - x);
  return std::sqrt(3.0) / (4.0 * pi) * (std::cbrt(1.0 + s) + std::cbrt(1.0 - s)) /
         (std::pow(x, 2.0 / 3.0) * s);
}
double cubic_rho1(double x) {
  double s = std::sqrt(1.0 - x);
  return std::sqrt(3.0) / (4.0 * pi) * (std::cbrt(1.0 + s) - std::cbrt(s - 1.0)) /
         (std::pow(-x, 2.0 / 3.0) * s);
}

double mass_target(const LaurentSymbol& a, int k) {
  return k <= 0 ? double(a.q() + k) / a.q() : double(a.p() - k) / a.p();
}

CurveArc reversed(const CurveArc& arc) {
  CurveArc out = arc;
  std::reverse(out.points.begin(), out.points.end());
  std::reverse(out.tangents.begin(), out.tangents.end());
  for (cplx& t : out.tangents) t = -t;
  std::swap(out.begin, out.end);
  return out;
}

}  // namespace

TEST_CASE("arcsine density at the origin is 1/(2 pi)") {
  DensitySample ds = density_at(testing::arcsine_symbol(), 0, cplx(0.0), cplx(1.0));
  CHECK(ds.real_density == Approx(1.0 / (2.0 * pi)).epsilon(1e-9));
  CHECK(std::abs(ds.complex_density.imag()) < 1e-10);
}

TEST_CASE("arcsine density matches 1/(pi sqrt(4 - x^2))") {
  LaurentSymbol a = testing::arcsine_symbol();
  for (double x = -1.9; x < 2.0; x += 0.38) {
    DensitySample ds = density_at(a, 0, cplx(x), cplx(1.0));
    CHECK(ds.real_density == Approx(1.0 / (pi * std::sqrt(4.0 - x * x))).epsilon(1e-8));
  }
}

TEST_CASE("density is orientation invariant") {
  LaurentSymbol a = testing::cubic_symbol();
  for (double x : {0.2, 0.5, 0.8}) {
    DensitySample fwd = density_at(a, 0, cplx(x), cplx(1.0));
    DensitySample bwd = density_at(a, 0, cplx(x), cplx(-1.0));
    CHECK(fwd.real_density == Approx(bwd.real_density).epsilon(1e-12));
  }
}

TEST_CASE("cubic example densities match the closed forms") {
  LaurentSymbol a = testing::cubic_symbol();
  for (double x = 0.08; x < 0.95; x += 0.1) {
    DensitySample ds = density_at(a, 0, cplx(x), cplx(1.0));
    CHECK(ds.real_density == Approx(cubic_rho0(x)).epsilon(1e-7));
  }
  for (double x : {-0.1, -0.5, -1.0, -5.0, -20.0}) {
    DensitySample ds = density_at(a, 1, cplx(x), cplx(1.0));
    CHECK(ds.real_density == Approx(cubic_rho1(x)).epsilon(1e-7));
  }
}

TEST_CASE("density singularity exponent at the triple root is 2/3") {
  LaurentSymbol a = testing::cubic_symbol();
  std::vector<double> lx, ly;
  for (double d = 1.5e-4; d < 2.5e-3; d *= 1.45) {
    DensitySample ds = density_at(a, 0, cplx(d), cplx(1.0));
    lx.push_back(std::log(d));
    ly.push_back(std::log(ds.real_density));
  }
  double n = static_cast<double>(lx.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == Approx(-2.0 / 3.0).epsilon(0.03));
}

TEST_CASE("density refuses branch-point neighborhoods and off-curve flags") {
  LaurentSymbol a = testing::cubic_symbol();
  CHECK_THROWS_AS(density_at(a, 0, cplx(5e-5), cplx(1.0)), NearSingularity);
}

TEST_CASE("masses of the examples") {
  struct Case {
    LaurentSymbol a;
    int k;
  };
  for (const auto& [a, k] : {Case{testing::arcsine_symbol(), 0}, Case{testing::cubic_symbol(), 0},
                             Case{testing::cubic_symbol(), 1}, Case{testing::quartic_symbol(), 0},
                             Case{testing::quartic_symbol(), 1}, Case{testing::quartic_symbol(), -1}}) {
    CurveFamily fam = trace_curve(a, k, 60.0);
    DiscreteMeasure m = discretize_measure(a, k, fam, 256);
    CHECK(m.total_mass() == Approx(mass_target(a, k)).epsilon(5e-3));
  }
}

TEST_CASE("overlapping curves: mu_{-1} equals mu_1 for the quartic symbol") {
  LaurentSymbol a = testing::quartic_symbol();
  CurveFamily f1 = trace_curve(a, 1, 40.0);
  CurveFamily fm1 = trace_curve(a, -1, 40.0);
  DiscreteMeasure m1 = discretize_measure(a, 1, f1, 200);
  DiscreteMeasure mm1 = discretize_measure(a, -1, fm1, 200);
  CHECK(m1.total_mass() == Approx(mm1.total_mass()).epsilon(1e-6));
  // same potentials at off-curve probes
  for (cplx probe : {cplx(1.0, 2.0), cplx(-3.0, 1.5), cplx(0.5, -2.5)}) {
    CHECK(log_potential(m1, probe) == Approx(log_potential(mm1, probe)).epsilon(1e-6));
  }
}

TEST_CASE("discretization is invariant under arc reversal") {
  LaurentSymbol a = testing::arcsine_symbol();
  CurveFamily fam = trace_curve(a, 0, 10.0);
  CurveFamily flipped = fam;
  for (CurveArc& arc : flipped.arcs) arc = reversed(arc);
  DiscreteMeasure m1 = discretize_measure(a, 0, fam, 128);
  DiscreteMeasure m2 = discretize_measure(a, 0, flipped, 128);
  REQUIRE(m1.size() == m2.size());
  CHECK(m1.total_mass() == Approx(m2.total_mass()).epsilon(1e-10));
  double p1 = log_potential(m1, cplx(3.0, 1.0));
  double p2 = log_potential(m2, cplx(3.0, 1.0));
  CHECK(p1 == Approx(p2).epsilon(1e-10));
}

TEST_CASE("nonnegative density across sampled points of all examples") {
  for (const LaurentSymbol& a : {testing::arcsine_symbol(), testing::cubic_symbol(),
                                 testing::quartic_symbol()}) {
    for (int k = -a.q() + 1; k <= a.p() - 1; ++k) {
      CurveFamily fam = trace_curve(a, k, 20.0);
      DiscreteMeasure m = discretize_measure(a, k, fam, 96);
      for (double w : m.weights) CHECK(w >= 0.0);
    }
  }
}

TEST_CASE("potential and Cauchy identities against w_k") {
  auto rng = testing::fixed_rng(5u);
  for (const LaurentSymbol& a : {testing::arcsine_symbol(), testing::cubic_symbol()}) {
    for (int k = -a.q() + 1; k <= a.p() - 1; ++k) {
      CurveFamily fam = trace_curve(a, k, 100.0);
      DiscreteMeasure m = discretize_measure(a, k, fam, 384);
      int checked = 0;
      for (int trial = 0; trial < 200 && checked < 20; ++trial) {
        cplx probe = testing::random_disk_point(rng, 6.0);
        if (distance_to_family(fam, probe) < 0.4) continue;
        ++checked;
        double lhs = log_potential(m, probe);
        double rhs = -std::log(std::abs(w_value(a, k, probe))) + alpha_k(a, k);
        CHECK(lhs == Approx(rhs).epsilon(2e-3));
        cplx ct = cauchy_transform(m, probe);
        cplx wd = w_logderiv(a, k, probe);
        CHECK(std::abs(ct - wd) < 2e-3 * (1.0 + std::abs(wd)));
      }
      CHECK(checked == 20);
    }
  }
}

TEST_CASE("cauchy transform of mu_0 at lambda = 3 equals -1/sqrt(5)") {
  LaurentSymbol a = testing::arcsine_symbol();
  CurveFamily fam = trace_curve(a, 0, 10.0);
  DiscreteMeasure m = discretize_measure(a, 0, fam, 384);
  CHECK(cauchy_transform(m, cplx(3.0)).real() == Approx(-1.0 / std::sqrt(5.0)).epsilon(1e-4));
  CHECK(std::abs(cauchy_transform(m, cplx(3.0)).imag()) < 1e-6);
}

TEST_CASE("log potential of the arcsine measure vanishes on the support") {
  LaurentSymbol a = testing::arcsine_symbol();
  CurveFamily fam = trace_curve(a, 0, 10.0);
  DiscreteMeasure m = discretize_measure(a, 0, fam, 512);
  for (double x = -1.8; x < 1.9; x += 0.35) {
    // probe midway between the two nearest support nodes
    double best = 1e300;
    cplx probe(x, 0.0);
    for (cplx s : m.points) {
      double d = std::abs(probe - s);
      if (d < best) best = d;
    }
    CHECK(std::abs(log_potential(m, probe)) < 5e-3);
  }
}

TEST_CASE("alpha constants") {
  LaurentSymbol ex1 = testing::cubic_symbol();
  CHECK(alpha_k(ex1, 0) == Approx(std::log(4.0 / 27.0)).epsilon(1e-14));
  CHECK(alpha_k(ex1, 1) == Approx(0.5 * std::log(4.0 / 27.0)).epsilon(1e-14));
  CHECK(alpha_k(ex1, 2) == 0.0);
  CHECK(alpha_k(ex1, -1) == 0.0);
  CHECK_THROWS_AS(alpha_k(ex1, 3), IndexOutOfRange);

  LaurentSymbol a = testing::arcsine_symbol();  // a_{-q} = 1
  CHECK(alpha_k(a, 0) == 0.0);
}

TEST_CASE("empty measure conventions") {
  DiscreteMeasure zero;
  CHECK(log_potential(zero, cplx(1.0, 1.0)) == 0.0);
  CHECK(cauchy_transform(zero, cplx(1.0, 1.0)) == cplx(0.0));
}

TEST_CASE("mass mismatches are flagged") {
  LaurentSymbol a = testing::cubic_symbol();
  CurveFamily fam = trace_curve(a, 1, 10.0);  // half the mass lies beyond this window
  QuadratureOptions opts;
  opts.nodes_per_arc = 64;
  opts.tail_radius_factor = 1.0;  // suppress the tail so the deficit shows
  CHECK_THROWS_AS(discretize_measure(a, 1, fam, opts), MassMismatch);
}

TEST_CASE("support collisions are detected") {
  DiscreteMeasure m;
  m.append(cplx(1.0, 0.0), 1.0, 0.1);
  CHECK_THROWS_AS(log_potential(m, cplx(1.0, 0.0)), SupportCollision);
  CHECK_THROWS_AS(cauchy_transform(m, cplx(1.0, 1e-14)), SupportCollision);
}
