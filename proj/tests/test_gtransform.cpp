#include <doctest.h>

#include <cmath>

#include "bihari/gtransform.hpp"

using namespace bihari;

// Closed-form antiderivative oracles at anchor c:
//   eta = K x            -> G(x) = log(x/c)/K
//   eta = K x^a, a<1     -> G(x) = (x^{1-a} - c^{1-a}) / (K (1-a))
//   eta = K x^2          -> G(x) = (1/c - 1/x)/K
namespace {
double G_log(double x, double c, double K) { return std::log(x / c) / K; }
double G_pow(double x, double c, double K, double a) {
  return (std::pow(x, 1.0 - a) - std::pow(c, 1.0 - a)) / (K * (1.0 - a));
}
double G_sq(double x, double c, double K) { return (1.0 / c - 1.0 / x) / K; }
}  // namespace

TEST_CASE("G matches closed forms") {
  GTransform gl(EtaSpec::linear(1.0), 1.0);
  CHECK(gl.G(std::exp(1.0)).value() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(gl.G(1.0).value() == 0.0);

  GTransform gp(EtaSpec::power(1.0, 0.5), 1.0);
  CHECK(gp.G(4.0).value() == doctest::Approx(2.0).epsilon(1e-10));

  GTransform gs(EtaSpec::square(1.0), 1.0);
  CHECK(gs.cached_sup().is_finite());
  CHECK(gs.cached_sup().value() == doctest::Approx(1.0).epsilon(1e-9));

  for (double x : log_spaced(1e-3, 1e3, 64)) {
    CHECK(gl.G(x).value() == doctest::Approx(G_log(x, 1.0, 1.0)).epsilon(1e-9));
    CHECK(gp.G(x).value() == doctest::Approx(G_pow(x, 1.0, 1.0, 0.5)).epsilon(1e-9));
    CHECK(gs.G(x).value() == doctest::Approx(G_sq(x, 1.0, 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("G at zero: Osgood sentinel vs finite improper integral") {
  GTransform gl(EtaSpec::linear(1.0), 1.0);
  CHECK(gl.G(0.0).is_neg_inf());
  CHECK(gl.G(1e-310).is_neg_inf());  // evaluation floor

  GTransform gp(EtaSpec::power(1.0, 0.5), 2.0);
  // -int_0^2 u^{-1/2} du = -2 sqrt(2)
  CHECK(gp.G(0.0).is_finite());
  CHECK(gp.G(0.0).value() == doctest::Approx(-2.0 * std::sqrt(2.0)).epsilon(1e-8));
}

TEST_CASE("G_inverse: sentinels and round trips") {
  GTransform gl(EtaSpec::linear(1.0), 1.0);
  CHECK(gl.G_inverse(1.0).value() == doctest::Approx(std::exp(1.0)).epsilon(1e-10));
  CHECK(gl.G_inverse(ExtReal::neg_inf()).value() == 0.0);

  GTransform gs(EtaSpec::square(1.0), 1.0);
  CHECK(gs.G_inverse(2.0).is_pos_inf());  // beyond sup(range(G)) = 1
  CHECK(gs.G_inverse(0.5).value() == doctest::Approx(2.0).epsilon(1e-9));

  for (const EtaSpec& s : {EtaSpec::linear(1.0), EtaSpec::power(1.0, 0.5),
                           EtaSpec::xlog(1.0), EtaSpec::square(1.0)}) {
    GTransform gt(s, 1.0);
    for (double x : log_spaced(1e-2, 1e2, 32)) {
      ExtReal gx = gt.G(x);
      REQUIRE(gx.is_finite());
      double back = gt.G_inverse(gx).value();
      CHECK(std::abs(back - x) <= 1e-8 * std::max(1.0, x));
    }
  }
}

TEST_CASE("G_inverse monotone on a sampled grid") {
  GTransform gt(EtaSpec::xlog(1.0), 1.0);
  double prev = 0.0;
  for (double y = -5.0; y <= 5.0; y += 0.25) {
    double v = gt.G_inverse(y).value();
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("anchor independence of the Bihari map") {
  for (const EtaSpec& s : {EtaSpec::linear(1.0), EtaSpec::power(1.0, 0.5)}) {
    GTransform g1(s, 1.0), g2(s, 3.7);
    for (double H : {0.5, 2.0, 10.0})
      for (double a : {0.0, 0.5, 2.0}) {
        double v1 = g1.G_inverse(g1.G(H) + ExtReal(a)).value();
        double v2 = g2.G_inverse(g2.G(H) + ExtReal(a)).value();
        CHECK(std::abs(v1 - v2) <= 1e-7 * std::max(1.0, v1));
      }
  }
}

TEST_CASE("tilde_G_p identity and inverse") {
  GTransform gl(EtaSpec::linear(1.0), 1.0);
  CHECK(gl.tilde_G_p(0.5, std::exp(1.0)).value() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(gl.tilde_G_p(0.5, 1.0).value() == doctest::Approx(0.0));
  GTransform gp(EtaSpec::power(1.0, 0.5), 1.0);
  CHECK(gp.tilde_G_p(0.75, 8.0).value() == doctest::Approx(1.5).epsilon(1e-9));

  CHECK(gl.tilde_G_p_inverse(0.5, 1.0).value() == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
  CHECK(gl.tilde_G_p_inverse(0.5, 0.0).value() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(gl.tilde_G_p_inverse(0.5, ExtReal::neg_inf()).value() == 0.0);
  GTransform gs(EtaSpec::square(1.0), 1.0);
  CHECK(gs.tilde_G_p_inverse(0.5, 2.0).is_pos_inf());
}

TEST_CASE("tilde_G_p round trip") {
  for (const EtaSpec& s : {EtaSpec::linear(1.0), EtaSpec::power(1.0, 0.5)}) {
    GTransform gt(s, 1.0);
    for (double p : {0.25, 0.5, 0.75})
      for (double x : log_spaced(1e-2, 1e2, 32)) {
        ExtReal y = gt.tilde_G_p(p, x);
        REQUIRE(y.is_finite());
        double back = gt.tilde_G_p_inverse(p, y).value();
        CHECK(std::abs(back - x) <= 1e-8 * std::max(1.0, x));
      }
  }
}

TEST_CASE("tilde_G_p equals direct quadrature of 1/eta_p") {
  for (const EtaSpec& s : {EtaSpec::linear(1.0), EtaSpec::power(1.0, 0.5)}) {
    GTransform gt(s, 1.0);
    for (double p : {0.25, 0.5, 0.75}) {
      auto inv_eta_p = [&](double u) { return 1.0 / eval_eta_p(s, p, u); };
      for (double x : log_spaced(0.1, 10.0, 9)) {
        double direct = detail::adaptive_simpson(inv_eta_p, 1.0, x, 1e-11);
        double via_G = gt.tilde_G_p(p, x).value();
        CHECK(std::abs(direct - via_G) <= 1e-7 * std::max(1.0, std::abs(via_G)));
      }
    }
  }
}

TEST_CASE("extreal sentinel ordering") {
  CHECK(ExtReal::neg_inf() < ExtReal(-1e308));
  CHECK(ExtReal(1e308) < ExtReal::pos_inf());
  CHECK(ExtReal::neg_inf() < ExtReal::pos_inf());
  CHECK((ExtReal(1.0) + ExtReal::pos_inf()).is_pos_inf());
  CHECK((ExtReal(1.0) + ExtReal::neg_inf()).is_neg_inf());
}
