#include <cmath>

#include "doctest.h"

#include "gffpin/disorder.hpp"
#include "gffpin/fields.hpp"
#include "gffpin/freeenergy.hpp"
#include "gffpin/kernels.hpp"
#include "gffpin/pinning.hpp"

using namespace gffpin;

namespace {

TIConfig budget(int nodes, std::int64_t sweeps, std::int64_t burn) {
  TIConfig c;
  c.nodes = nodes;
  c.sched = {sweeps, burn, 1};
  return c;
}

}  // namespace

TEST_CASE("thermodynamic integration reproduces the exact one-site log Z") {
  const BoxGeometry g(2);
  for (double omega : {-0.8, 0.7}) {
    const DisorderField w = constant_disorder(g, omega);
    PinningParams start;
    start.domain = InteractionDomain::Interior;
    PinningParams target = start;
    target.beta = 0.8;
    target.h = 0.5;
    GibbsChain chain(g, start, w, Rng(3, "ti"));
    const LogZ z = log_partition_ti(chain, target, budget(8, 40000, 200));
    const double exact = exact_partition_small(g, target, w);
    CHECK(std::abs(z.value - exact) < 4 * z.se);
    CHECK(chain.params().h == target.h);
  }
}

TEST_CASE("pure free energy: zero at h = 0, nonpositive below") {
  const TIConfig cfg = budget(4, 300, 50);
  const FreeEnergyEstimate z = pure_free_energy_estimate(8, 0.0, cfg, 1);
  CHECK(z.value == 0.0);
  CHECK(z.se == 0.0);
  const FreeEnergyEstimate neg = pure_free_energy_estimate(8, -0.5, cfg, 1);
  CHECK(neg.value <= 3 * neg.se);
  const FreeEnergyEstimate a = annealed_free_energy(8, 0.3, cfg, 2);
  const FreeEnergyEstimate p = pure_free_energy_estimate(8, 0.3, cfg, 2);
  CHECK(a.value == p.value);
  CHECK(p.value > 0.0);
}

TEST_CASE("quenched estimate at beta = 0 agrees with the pure one") {
  const TIConfig cfg = budget(4, 1500, 200);
  const FreeEnergyEstimate q = quenched_free_energy_estimate(DisorderSpec::gaussian(), 0.0, 0.3, 8, 4, cfg, 5);
  const FreeEnergyEstimate p = pure_free_energy_estimate(8, 0.3, budget(4, 6000, 200), 6);
  CHECK(std::abs(q.value - p.value) < 4 * std::hypot(q.se, p.se));
  CHECK(q.replicas == 4);
}

TEST_CASE("delocalised regime: the finite-volume value is a boundary term") {
  // Sites next to the zero boundary cannot escape the strip, so (1/N^2) log Z
  // is of order -1/N and vanishes only in the limit.
  std::vector<double> nf;
  for (int N : {8, 16, 32}) {
    const FreeEnergyEstimate e =
        quenched_free_energy_estimate(DisorderSpec::gaussian(), 0.5, -5.0, N, 2, budget(4, 300, 50), 7);
    CHECK(e.value < 0.0);
    nf.push_back(N * e.value);
  }
  CHECK(nf[1] / nf[0] == doctest::Approx(1.0).epsilon(0.3));
  CHECK(nf[2] / nf[0] == doctest::Approx(1.0).epsilon(0.3));
}

TEST_CASE("massive shifted estimate vanishes when the strip is out of reach") {
  const FreeEnergyEstimate f = massive_shifted_free_energy_estimate(DisorderSpec::gaussian(), 0.5, 0.3, 0.3, 50.0,
                                                                    8, 2, budget(3, 200, 20), 8);
  CHECK(f.value == 0.0);
}

TEST_CASE("parameter schedule") {
  const ParameterSchedule s = parameter_schedule(0.5);
  CHECK(s.alpha == 0.75);
  CHECK(s.gamma == doctest::Approx(2 * std::sqrt(2 * kPi)).epsilon(1e-15));
  CHECK(s.gamma == doctest::Approx(5.01326).epsilon(1e-6));
  CHECK(s.log_N == 1048576.0);
  CHECK(s.log_m == doctest::Approx(-s.log_N + 0.25 * std::log(s.log_N)));
  for (double h = 0.01; h < 0.5; h += 0.01) {
    const ParameterSchedule t = parameter_schedule(h);
    CHECK(t.log_lower <= t.log_upper);
  }
  const ParameterSchedule t = parameter_schedule(0.9);
  CHECK(desk_u(std::exp(t.log_N)) == doctest::Approx(t.u).epsilon(1e-12));
  CHECK(desk_m(256) == doctest::Approx(std::pow(std::log(256.0), 0.25) / 256).epsilon(1e-15));
  CHECK(desk_m(256) == doctest::Approx(0.0059945).epsilon(1e-4));
  CHECK_THROWS_AS(parameter_schedule(0.0), DomainError);
  CHECK_THROWS_AS(parameter_schedule(1.0), DomainError);
}

TEST_CASE("copolymer critical point") {
  for (double rho : {0.05, 0.3, 1.2}) {
    CHECK(copolymer_critical_point(DisorderSpec::gaussian(), rho) == doctest::Approx(rho).epsilon(1e-14));
    CHECK(copolymer_critical_point(DisorderSpec::bernoulli(), rho) ==
          doctest::Approx(std::log(std::cosh(2 * rho)) / (2 * rho)).epsilon(1e-13));
  }
  CHECK(copolymer_critical_point(DisorderSpec::bernoulli(), 1e-6) < 1e-5);
  CHECK_THROWS_AS(copolymer_critical_point(DisorderSpec::gaussian(), 0.0), DomainError);
  DisorderSpec bounded = DisorderSpec::bernoulli();
  bounded.beta_bar = 1.0;
  CHECK_THROWS_AS(copolymer_critical_point(bounded, 0.6), DomainError);
}

TEST_CASE("event flags") {
  const BoxGeometry g(32);
  FieldSample flat;
  flat.N = 32;
  flat.phi.assign(g.size(), 0.0);
  EventThresholds t;
  t.h = 0.5;
  t.m = 0.1;
  t.K = 0.2;
  const EventFlags f = event_flags(g, flat, t);
  REQUIRE(f.A_h.has_value());
  CHECK(*f.A_h);
  CHECK_FALSE(*f.D);
  CHECK_FALSE(f.A.has_value());
  CHECK_FALSE(f.B.has_value());
  CHECK(f.max_abs == 0.0);

  const double m = 0.05;
  const double unit = unit_for_scale_count(m, 3);
  ScaleStackSampler sampler(g, scale_time_grid(m, unit));
  const HarmonicSolver solver(g, m);
  const InfiniteBoundarySampler bs(g, m);
  Rng rng(4, "flags");
  EventThresholds th;
  th.m = m;
  th.K = 0.15;
  th.unit = unit;
  th.frame_reference = 40.0;
  th.u = 0.5;
  const double fm = f_of_m(m);
  for (int i = 0; i < 60; ++i) {
    const FieldSample s0 = sampler.sample(rng);
    const FieldSample s = shift_by_extension(s0, solver.solve(bs.sample(rng)));
    const EventFlags e = event_flags(g, s, th);
    REQUIRE(e.A.has_value());
    REQUIRE(e.C_prime.has_value());
    REQUIRE(e.D.has_value());
    CHECK(*e.D == event_D(g, s.full(), m, th.K, fm));
    if (e.B) {
      CHECK((!*e.B || *e.C));
      CHECK((!*e.C || (*e.D && *e.C_prime)));
    }
    // A_N holds exactly when the worst excess is nonpositive.
    CHECK(*e.A == (e.A_worst <= 0.0));
    CHECK(e.sum_sq_tilde <= e.sum_sq_full);
  }
}

TEST_CASE("conditioned contact statistics") {
  ContactStatsConfig c;
  c.N = 16;
  c.samples = 300;
  c.pair_samples = 20000;
  c.K = 0.15;
  const ContactStatistics s = conditioned_contact_statistics(c, 11);
  CHECK(s.L_prime.value <= s.L.value);
  CHECK(s.L_prime.value >= 0.0);
  CHECK(std::isfinite(s.second_moment_ratio));
  if (s.L_prime.value > 0.0) CHECK(s.second_moment_ratio >= 1.0 - 1e-12);
  CHECK(s.k == 3);
  CHECK(s.samples == 300);
  std::int64_t total = 0;
  for (auto n : s.j_histogram) total += n;
  CHECK(total > 0);
  CHECK(s.freq_A >= 0.0);
  CHECK(s.freq_A <= 1.0);
  CHECK(s.freq_B >= 0.0);
  CHECK(s.freq_B <= 1.0);
}

TEST_CASE("finite-volume criterion verdicts") {
  const auto spec = DisorderSpec::gaussian();
  const TIConfig cfg = budget(4, 200, 50);
  const CriterionReport pos = finite_volume_criterion(spec, 0.5, 2.0, 0.3, 0.0, 10.0, 12, 2, cfg, 3);
  CHECK(pos.positive);
  CHECK(pos.penalty == doctest::Approx(10.0 * 0.09));
  CHECK(pos.margin == doctest::Approx(pos.estimate - pos.penalty));
  const CriterionReport neg = finite_volume_criterion(spec, 0.5, -3.0, 0.3, 0.0, 10.0, 12, 2, cfg, 3);
  CHECK_FALSE(neg.positive);
  const CriterionReport huge = finite_volume_criterion(spec, 0.5, 2.0, 0.3, 0.0, 1e4, 12, 2, cfg, 3);
  CHECK_FALSE(huge.positive);
}
