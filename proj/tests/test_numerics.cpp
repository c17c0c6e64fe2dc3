#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"

#include "gffpin/common.hpp"
#include "gffpin/numerics.hpp"
#include "gffpin/parallel.hpp"
#include "gffpin/rng.hpp"
#include "gffpin/stats.hpp"

using namespace gffpin;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Reference outputs of the Random123 distribution.
  auto a = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(a[0] == 0x6627e8d5u);
  CHECK(a[1] == 0xe169c58du);
  CHECK(a[2] == 0xbc57ac4cu);
  CHECK(a[3] == 0x9b00dbd8u);
  auto b = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(b[0] == 0x408f276du);
  CHECK(b[1] == 0x41c83b0eu);
  CHECK(b[2] == 0xa20bc7c6u);
  CHECK(b[3] == 0x6d5451fdu);
  auto c = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  CHECK(c[0] == 0xd16cfe09u);
  CHECK(c[1] == 0x94fdccebu);
  CHECK(c[2] == 0x5001e420u);
  CHECK(c[3] == 0x24126ea1u);
}

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(42, "field", 3), b(42, "field", 3), c(42, "field", 4), d(42, "disorder", 3);
  std::set<std::uint32_t> firsts;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    if (i == 0) {
      firsts.insert(x);
      firsts.insert(c());
      firsts.insert(d());
    }
  }
  CHECK(firsts.size() == 3);
  CHECK(derive_key(1, "a", 0) != derive_key(1, "a", 1));
  CHECK(derive_key(1, "a", 0) != derive_key(2, "a", 0));
  CHECK(derive_key(1, "a", 0) != derive_key(1, "b", 0));
}

TEST_CASE("uniform lies in (0,1) and normal has unit variance") {
  Rng r(7, "test");
  RunningStats u, z;
  for (int i = 0; i < 200000; ++i) {
    const double x = r.uniform();
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
    u.add(x);
    z.add(r.normal());
  }
  CHECK(std::abs(u.mean() - 0.5) < 4.0 * u.sem());
  CHECK(std::abs(z.mean()) < 4.0 * z.sem());
  CHECK(std::abs(z.variance() - 1.0) < 4.0 * std::sqrt(2.0 / 200000));
}

TEST_CASE("normal distribution functions") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
  CHECK(normal_cdf(2.0) == doctest::Approx(0.9772498680518208).epsilon(1e-14));
  CHECK(normal_sf(10.0) == doctest::Approx(7.619853024160527e-24).epsilon(1e-12));
  CHECK(normal_mass(-2.0, 2.0) == doctest::Approx(0.9544997361036416).epsilon(1e-14));
  CHECK(normal_mass(30.0, 31.0) > 0.0);
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.9, 0.999999}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
    CHECK(normal_sf(normal_isf(p)) == doctest::Approx(p).epsilon(1e-10));
  }
}

TEST_CASE("truncated normal stays in its interval and has the right mean") {
  Rng r(3, "trunc");
  struct Case {
    double a, b;
  };
  for (Case c : {Case{-1.0, 1.0}, Case{2.0, 3.0}, Case{8.0, INFINITY}, Case{-INFINITY, -6.0},
                 Case{-0.5, INFINITY}}) {
    RunningStats st;
    for (int i = 0; i < 40000; ++i) {
      const double x = sample_truncated_normal(c.a, c.b, r);
      REQUIRE(x >= c.a);
      REQUIRE(x <= c.b);
      st.add(x);
    }
    const auto pdf = [](double z) { return std::isinf(z) ? 0.0 : std::exp(-0.5 * z * z) / std::sqrt(2 * kPi); };
    const double mean = (pdf(c.a) - pdf(c.b)) / normal_mass(c.a, c.b);
    CHECK(std::abs(st.mean() - mean) < 5.0 * st.sem());
  }
}

TEST_CASE("scaled Bessel functions") {
  const auto v = scaled_bessel_i(1.0, 3);
  CHECK(v[0] == doctest::Approx(0.46575960759364043).epsilon(1e-13));
  CHECK(v[1] == doctest::Approx(0.2079104153497085).epsilon(1e-13));
  CHECK(v[2] == doctest::Approx(0.0499387768942235).epsilon(1e-12));
  const auto w = scaled_bessel_i(2.0, 0);
  // e^{-2} I_0(2)
  CHECK(w[0] == doctest::Approx(0.308508322553671).epsilon(1e-12));
  // Large argument: e^{-x} I_0(x) ~ 1/sqrt(2 pi x).
  const auto big = scaled_bessel_i(1e6, 2);
  CHECK(big[0] == doctest::Approx(1.0 / std::sqrt(2 * kPi * 1e6)).epsilon(1e-6));
  // Sum rule e^{-x} (I_0 + 2 sum I_n) = 1.
  const auto s = scaled_bessel_i(5.0, 60);
  double tot = s[0];
  for (int n = 1; n <= 60; ++n) tot += 2.0 * s[n];
  CHECK(tot == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("quadrature rules") {
  const QuadRule q = gauss_legendre(7, 0.0, 2.0);
  double s = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i) s += q.w[i] * std::pow(q.x[i], 13);
  CHECK(s == doctest::Approx(std::pow(2.0, 14) / 14.0).epsilon(1e-13));
  CHECK(integrate_gl([](double x) { return std::sin(x); }, 0.0, kPi, 4) ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(integrate_adaptive([](double x) { return std::exp(-0.5 * x * x); }, -3.0, 5.0, 1e-13) ==
        doctest::Approx(std::sqrt(2 * kPi) * normal_mass(-3.0, 5.0)).epsilon(1e-13));
  // A log singularity split geometrically towards the origin.
  double lg = 0.0;
  for (int i = 0; i < 60; ++i)
    lg += integrate_adaptive([](double x) { return std::log(x); }, std::ldexp(1.0, -i - 1), std::ldexp(1.0, -i), 1e-14);
  CHECK(lg == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(integrate_time([](double t) { return std::exp(-t); }, 0.0, 60.0) ==
        doctest::Approx(1.0 - std::exp(-60.0)).epsilon(1e-12));
  CHECK(integrate_time([](double t) { return 1.0 / (1.0 + t * t); }, 0.0, 1e4) ==
        doctest::Approx(std::atan(1e4)).epsilon(1e-12));
  CHECK_THROWS_AS(integrate_time([](double t) { return t; }, 0.0, INFINITY), DomainError);
  CHECK(expint_e1(1.0) == doctest::Approx(0.21938393439552026).epsilon(1e-13));
  CHECK(expint_e1(1e-3) == doctest::Approx(6.33153936413615).epsilon(1e-12));
}

TEST_CASE("running statistics merge is order independent") {
  Rng r(11, "stats");
  std::vector<double> x(1000);
  for (double& v : x) v = r.normal() * 3.0 + 1.0;
  RunningStats all, a, b, c;
  for (int i = 0; i < 1000; ++i) {
    all.add(x[i]);
    (i < 300 ? a : i < 700 ? b : c).add(x[i]);
  }
  RunningStats ab = a;
  ab.merge(b);
  ab.merge(c);
  RunningStats cb = c;
  cb.merge(b);
  cb.merge(a);
  CHECK(ab.count() == 1000);
  CHECK(ab.mean() == doctest::Approx(all.mean()).epsilon(1e-12));
  CHECK(cb.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
}

TEST_CASE("autocorrelation time of iid and AR(1) series") {
  Rng r(5, "ar");
  std::vector<double> iid(50000), ar(50000);
  double y = 0.0;
  const double phi = 0.8;
  for (std::size_t i = 0; i < iid.size(); ++i) {
    iid[i] = r.normal();
    y = phi * y + r.normal();
    ar[i] = y;
  }
  CHECK(integrated_autocorrelation_time(iid) == doctest::Approx(0.5).epsilon(0.1));
  // tau = (1/2) (1 + phi) / (1 - phi) = 4.5
  CHECK(integrated_autocorrelation_time(ar) == doctest::Approx(4.5).epsilon(0.15));
  double tau = 0.0;
  const Estimate e = correlated_mean(ar, &tau);
  CHECK(e.se > 0.0);
  CHECK(std::abs(e.value) < 5.0 * e.se);
}

TEST_CASE("covariance accumulator") {
  Rng r(9, "cov");
  CovarianceAccumulator acc(2);
  for (int i = 0; i < 100000; ++i) {
    const double a = r.normal(), b = r.normal();
    const double v[2] = {a, 0.5 * a + b};
    acc.add(v);
  }
  CHECK(std::abs(acc.cov(0, 0) - 1.0) < 5 * acc.cov_se(0, 0));
  CHECK(std::abs(acc.cov(0, 1) - 0.5) < 5 * acc.cov_se(0, 1));
  CHECK(std::abs(acc.cov(1, 1) - 1.25) < 5 * acc.cov_se(1, 1));
}

TEST_CASE("parallel_for covers every index once and rethrows") {
  for (int threads : {1, 3}) {
    set_worker_threads(threads);
    std::vector<int> hits(1000, 0);
    parallel_for(1000, [&](std::int64_t i) { hits[i] += 1; });
    for (int h : hits) REQUIRE(h == 1);
    CHECK_THROWS_AS(parallel_for(10, [](std::int64_t i) {
                      if (i == 7) throw DomainError("boom");
                    }),
                    DomainError);
  }
  set_worker_threads(1);
}
