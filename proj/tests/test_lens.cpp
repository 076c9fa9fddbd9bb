#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "lenscatter/lens.hpp"

using namespace lenscatter;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralField test_field(int M, double rate) {
  SpectralField f = zero_field(M);
  for (int m = 0; m < M; ++m) {
    double dec = std::exp(-rate * m);
    f.coeffs[m] = cplx(dec * std::cos(1.3 * m + 0.2),
                       0.7 * dec * std::sin(0.9 * m + 0.4));
  }
  return f;
}

double field_dist(const SpectralField& a, const SpectralField& b) {
  SpectralField d = a;
  for (int m = 0; m < d.modes(); ++m) d.coeffs[m] -= b.coeffs[m];
  return l2_norm(d);
}

}  // namespace

TEST_CASE("endpoint dictionary phases") {
  LensState v0 = inject_minus(basis_field(8, 0), 1);
  CHECK(v0.t_lens == -kPi / 2);
  CHECK(std::abs(v0.field.coeffs[0] - std::polar(1.0, kPi / 4)) <= 1e-15);

  LensState v1 = inject_minus(basis_field(8, 1), 1);
  CHECK(std::abs(v1.field.coeffs[1] - std::polar(1.0, 3 * kPi / 4)) <= 1e-15);
  CHECK(std::abs(v1.field.coeffs[0]) == 0.0);

  LensState end{basis_field(8, 2), kPi / 2};
  SpectralField u = extract_plus(end, 1);
  // i^2 e^{i pi/4} = e^{i 5 pi/4}
  CHECK(std::abs(u.coeffs[2] - std::polar(1.0, 5 * kPi / 4)) <= 1e-15);

  CHECK_THROWS_AS(extract_plus({basis_field(8, 0), 0.3}, 1),
                  std::invalid_argument);
}

TEST_CASE("zero coupling scattering is the identity") {
  const int M = 64;
  TransformPlan plan(M);
  SpectralField f = test_field(M, 0.1);
  for (double tau : {0.1, 0.01}) {
    ScatterConfig cfg;
    cfg.coupling = 0.0;
    cfg.tau = tau;
    SpectralField u = scatter(f, cfg, plan);
    CHECK(field_dist(u, f) <= 1e-12 * l2_norm(f));
  }
}

TEST_CASE("scattering preserves mass") {
  const int M = 64;
  TransformPlan plan(M);
  SpectralField f = test_field(M, 0.1);
  double n0 = l2_norm(f);
  for (cplx& a : f.coeffs) a /= n0;

  ScatterConfig cfg;  // defocusing, sigma 2, coupling 1
  cfg.tau = 0.01;
  SpectralField u = scatter(f, cfg, plan);
  CHECK(std::abs(l2_norm(u) - 1.0) <= 1e-10);
}

TEST_CASE("scattering preserves parity") {
  const int M = 64;
  TransformPlan plan(M);
  SpectralField f = zero_field(M);
  for (int m = 0; m < M; m += 2)
    f.coeffs[m] = std::exp(-0.2 * m) * cplx(1.0, 0.3);
  ScatterConfig cfg;
  cfg.tau = 0.01;
  SpectralField u = scatter(f, cfg, plan);
  double odd = 0.0;
  for (int m = 1; m < M; m += 2) odd += std::norm(u.coeffs[m]);
  CHECK(std::sqrt(odd) <= 1e-10);
}

TEST_CASE("recording run structure") {
  const int M = 32;
  TransformPlan plan(M);
  SpectralField f = test_field(M, 0.2);
  ScatterConfig cfg;
  cfg.tau = kPi / 16;
  cfg.record_stride = 4;
  ScatterOutcome out = scatter_recording(f, cfg, plan);
  CHECK(!out.abort);
  REQUIRE(out.series.size() >= 3);
  CHECK(out.series.front().t_lens == -kPi / 2);
  CHECK(out.series.back().t_lens == doctest::Approx(kPi / 2));
  CHECK(out.u_plus.modes() == M);
}

TEST_CASE("long-range maps reduce to the plain dictionary at zero log phase") {
  const int M = 32;
  TransformPlan plan(M);
  SpectralField f = test_field(M, 0.2);

  ScatterConfig cfg;
  cfg.sigma = 1.0;  // d * sigma = 1
  cfg.long_range = true;
  cfg.endpoint_offset = kPi / 4;  // log tan(pi/4) = 0
  LensState lr = inject_minus_long_range(f, cfg, plan);
  LensState plain = inject_minus(f, 1);
  CHECK(lr.t_lens == doctest::Approx(-kPi / 4));
  CHECK(field_dist(lr.field, plain.field) <= 1e-12 * l2_norm(f));
}

TEST_CASE("long-range extraction keeps node moduli") {
  const int M = 48;
  TransformPlan plan(M);
  ScatterConfig cfg;
  cfg.sigma = 1.0;
  cfg.long_range = true;
  cfg.endpoint_offset = 0.01;

  SpectralField end = test_field(M, 0.15);
  LensState state{end, kPi / 2 - cfg.endpoint_offset};
  SpectralField u_plus = extract_plus_long_range(state, cfg, plan);

  std::vector<cplx> inner = plan.synthesize(end);
  std::vector<cplx> outer = plan.synthesize(fourier(u_plus));
  double worst = 0.0;
  for (int k = 0; k < M; ++k)
    worst = std::max(worst, std::abs(std::abs(outer[k]) - std::abs(inner[k])));
  CHECK(worst <= 1e-10);

  CHECK_THROWS_AS(extract_plus_long_range({end, kPi / 2}, cfg, plan),
                  std::invalid_argument);
}

TEST_CASE("long-range injection phase depends on the sign as expected") {
  const int M = 32;
  TransformPlan plan(M);
  SpectralField f = test_field(M, 0.3);
  for (cplx& a : f.coeffs) a *= 0.2;  // keep 2 L |z|^2 well below pi

  ScatterConfig cfg;
  cfg.sigma = 1.0;
  cfg.long_range = true;
  cfg.endpoint_offset = 0.05;
  const double L = std::log(std::tan(kPi / 2 - 0.05));

  ScatterConfig neg = cfg;
  neg.sign = -1;
  std::vector<cplx> vp = plan.synthesize(inject_minus_long_range(f, cfg, plan).field);
  std::vector<cplx> vm = plan.synthesize(inject_minus_long_range(f, neg, plan).field);
  for (int k = M / 2 - 4; k < M / 2 + 4; ++k) {
    CHECK(std::abs(std::abs(vp[k]) - std::abs(vm[k])) <= 1e-13);
    double want = 2.0 * L * std::norm(vp[k]);
    CHECK(std::arg(vp[k] * std::conj(vm[k])) ==
          doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("aborted propagation surfaces through both entry points") {
  const int M = 16;
  TransformPlan plan(M);
  SpectralField f = test_field(M, 0.3);
  ScatterConfig cfg;
  cfg.tau = 0.1;
  cfg.mass_drift_tol = 0.0;

  ScatterOutcome out = scatter_recording(f, cfg, plan);
  REQUIRE(out.abort.has_value());
  CHECK(out.abort->reason == "mass drift beyond tolerance");
  CHECK(out.u_plus.modes() == 0);

  CHECK_THROWS_AS(scatter(f, cfg, plan), PropagationAborted);
  try {
    scatter(f, cfg, plan);
  } catch (const PropagationAborted& e) {
    CHECK(std::string(e.what()).find("aborted") != std::string::npos);
    CHECK(e.info.reason == "mass drift beyond tolerance");
  }
}

TEST_CASE("argument validation") {
  TransformPlan plan(16);
  ScatterConfig cfg;
  CHECK_THROWS_AS(scatter(test_field(8, 0.1), cfg, plan),
                  std::invalid_argument);  // mode mismatch

  ScatterConfig borderline;
  borderline.sigma = 1.0;  // d * sigma = 1 without the long-range maps
  CHECK_THROWS_AS(scatter(test_field(16, 0.1), borderline, plan),
                  std::invalid_argument);
  borderline.coupling = 0.0;  // linear runs are fine at any sigma
  CHECK_NOTHROW(scatter(test_field(16, 0.1), borderline, plan));

  ScatterConfig bad_off;
  bad_off.sigma = 1.0;
  bad_off.long_range = true;
  bad_off.endpoint_offset = 1.0;  // > pi/4
  CHECK_THROWS_AS(scatter(test_field(16, 0.1), bad_off, plan),
                  std::invalid_argument);

  ScatterConfig wrong_sigma;
  wrong_sigma.sigma = 2.0;
  wrong_sigma.long_range = true;
  wrong_sigma.endpoint_offset = 0.1;
  CHECK_THROWS_AS(scatter(test_field(16, 0.1), wrong_sigma, plan),
                  std::invalid_argument);
}
