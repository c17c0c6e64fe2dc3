#include <cmath>

#include "doctest.h"

#include "gffpin/disorder.hpp"
#include "gffpin/fields.hpp"
#include "gffpin/kernels.hpp"
#include "gffpin/numerics.hpp"
#include "gffpin/pinning.hpp"
#include "gffpin/stats.hpp"

using namespace gffpin;

namespace {

PinningParams pinning(double beta, double h, InteractionDomain d = InteractionDomain::Interior) {
  PinningParams p;
  p.beta = beta;
  p.h = h;
  p.domain = d;
  return p;
}

}  // namespace

TEST_CASE("interaction energy") {
  const BoxGeometry g(4);
  const DisorderField zero = constant_disorder(g, 0.0);
  std::vector<double> far(g.size(), 5.0);
  for (int b : g.boundary_sites()) far[b] = 0.0;
  CHECK(energy(g, far, pinning(1.0, 0.5), zero) == 0.0);
  std::vector<double> one = far;
  one[g.index(2, 2)] = 0.3;
  // beta omega - lambda(beta) + h = 0 - 1/2 + 1/2
  CHECK(energy(g, one, pinning(1.0, 0.5), zero) == 0.0);
  CHECK(energy(g, one, pinning(1.0, 1.5), zero) == doctest::Approx(1.0));
  // Tilde domain also sees the boundary sites on the two far sides.
  CHECK(energy(g, one, pinning(0.0, 1.0, InteractionDomain::Tilde), zero) == doctest::Approx(1.0 + 7.0));
  PinningParams cop;
  cop.model = ModelKind::Copolymer;
  cop.rho = 0.7;
  cop.h = 0.2;
  cop.domain = InteractionDomain::Interior;
  CHECK(energy(g, far, cop, zero) == 0.0);
  std::vector<double> neg = far;
  neg[g.index(1, 1)] = -0.1;
  neg[g.index(3, 2)] = -4.0;
  CHECK(energy(g, neg, cop, zero) == doctest::Approx(2 * -2.0 * 0.7 * 0.2));
  CHECK(negative_indicator({-1.0, 0.0, 1.0}) == std::vector<char>{1, 0, 0});
  CHECK(contact_indicator({-1.0, 1.0, 1.5, -1.01}, 0.0) == std::vector<char>{1, 1, 0, 0});
  CHECK(parse_domain("interior") == InteractionDomain::Interior);
  CHECK(to_string(InteractionDomain::Tilde) == "tilde");
  CHECK_THROWS_AS(parse_domain("nowhere"), ConfigError);
  CHECK_THROWS_AS(parse_model_kind("polymer"), ConfigError);
}

TEST_CASE("exact partition function on one and two interior sites") {
  const BoxGeometry g2(2);
  const DisorderField zero = constant_disorder(g2, 0.0);
  const double p = normal_mass(-2.0, 2.0);
  CHECK(exact_partition_small(g2, pinning(0.0, 1.0), zero) ==
        doctest::Approx(std::log(1.0 + (std::exp(1.0) - 1.0) * p)).epsilon(1e-12));
  CHECK(exact_partition_small(g2, pinning(0.0, 0.0), zero) == 0.0);
  CHECK(exact_partition_small(g2, pinning(0.0, 0.0, InteractionDomain::Tilde), zero) == 0.0);
  CHECK_THROWS_AS(exact_partition_small(BoxGeometry(4), pinning(0.0, 1.0), constant_disorder(BoxGeometry(4), 0.0)),
                  Unsupported);

  // Two correlated sites: compare with a tensor Gauss-Legendre evaluation.
  const BoxGeometry g(2);
  PinningParams shifted = pinning(0.0, 0.7);
  shifted.bc = BoundaryCondition::constant_value(0.6);
  shifted.m = 0.4;
  const double a = 4.0 + 0.16;
  const double sd = 1.0 / std::sqrt(a), mu = 4.0 * 0.6 / a;
  const double in = normal_mass((-1.0 - mu) / sd, (1.0 - mu) / sd);
  CHECK(exact_partition_small(g, shifted, zero) ==
        doctest::Approx(std::log(1.0 + (std::exp(0.7) - 1.0) * in)).epsilon(1e-12));
  const double two = gaussian_weighted_log_mass({0.1, -0.2}, {{0.3, 0.1}, {0.1, 0.25}}, {0.8, -0.5},
                                                Region{-1.0, 1.0, false});
  // Tensor Gauss-Legendre with panels split at the region edges.
  QuadRule r;
  for (auto [lo, hi] : {std::pair{-9.0, -1.0}, std::pair{-1.0, 1.0}, std::pair{1.0, 9.0}}) {
    const QuadRule piece = gauss_legendre(80, lo, hi);
    r.x.insert(r.x.end(), piece.x.begin(), piece.x.end());
    r.w.insert(r.w.end(), piece.w.begin(), piece.w.end());
  }
  double ref = 0.0;
  const double det = 0.3 * 0.25 - 0.01;
  for (std::size_t i = 0; i < r.x.size(); ++i)
    for (std::size_t j = 0; j < r.x.size(); ++j) {
      const double x = r.x[i] - 0.1, y = r.x[j] + 0.2;
      const double dens = std::exp(-0.5 * (0.25 * x * x - 0.2 * x * y + 0.3 * y * y) / det) / (2 * kPi * std::sqrt(det));
      const double w = (std::abs(r.x[i]) <= 1 ? std::exp(0.8) : 1.0) * (std::abs(r.x[j]) <= 1 ? std::exp(-0.5) : 1.0);
      ref += r.w[i] * r.w[j] * dens * w;
    }
  CHECK(two == doctest::Approx(std::log(ref)).epsilon(1e-10));
}

TEST_CASE("annealing identity: E_omega Z equals the pure partition function") {
  const BoxGeometry g(2);
  const PinningParams pure = pinning(0.0, 0.6);
  const double z0 = std::exp(exact_partition_small(g, pure, constant_disorder(g, 0.0)));
  Rng rng(21, "anneal");
  RunningStats z;
  for (int i = 0; i < 10000; ++i)
    z.add(std::exp(exact_partition_small(g, pinning(0.8, 0.6), constant_disorder(g, rng.normal()))));
  CHECK(std::abs(z.mean() - z0) < 4 * z.sem());
}

TEST_CASE("heat-bath chain on one site matches the closed form") {
  const BoxGeometry g(2);
  const DisorderField zero = constant_disorder(g, 0.0);
  const int x = g.index(1, 1);
  SUBCASE("h = 1") {
    const ChainResult r = run_chain(g, pinning(0.0, 1.0), zero, {200000, 100, 1}, 4);
    const double p = normal_mass(-2.0, 2.0), e = std::exp(1.0);
    CHECK(std::abs(r.contact_fraction.value - e * p / (e * p + 1 - p)) < 4 * r.contact_fraction.se);
  }
  SUBCASE("h = 0 leaves the Gaussian law") {
    GibbsChain c(g, pinning(0.0, 0.0), zero, Rng(5, "plain"));
    RunningStats mean, sq;
    for (int t = 0; t < 100000; ++t) {
      c.sweep();
      mean.add(c.field()[x]);
      sq.add(c.field()[x] * c.field()[x]);
    }
    CHECK(std::abs(mean.mean()) < 4 * mean.sem());
    CHECK(std::abs(sq.mean() - 0.25) < 4 * sq.sem());
  }
  SUBCASE("saturation at s = 30") {
    const ChainResult r = run_chain(g, pinning(0.0, 30.0), zero, {20000, 10, 1}, 6);
    CHECK(r.contact_fraction.value >= 0.999);
  }
}

TEST_CASE("chains are reproducible and respond to h") {
  const BoxGeometry g(32);
  const DisorderField w = sample_disorder(g, DisorderSpec::gaussian(), 3);
  const ChainSchedule s{300, 50, 1};
  const ChainResult a = run_chain(g, pinning(0.5, 0.2), w, s, 8);
  const ChainResult b = run_chain(g, pinning(0.5, 0.2), w, s, 8);
  REQUIRE(a.stream.size() == b.stream.size());
  for (std::size_t i = 0; i < a.stream.size(); ++i) {
    CHECK(a.stream[i].contacts == b.stream[i].contacts);
    CHECK(a.stream[i].energy == b.stream[i].energy);
  }
  CHECK(a.final_field == b.final_field);
  const ChainResult c = run_chain(g, pinning(0.5, 0.2), w, s, 8, 1);
  CHECK(c.final_field != a.final_field);

  const DisorderField zero = constant_disorder(g, 0.0);
  CHECK(run_chain(g, pinning(0.0, -10.0), zero, s, 9).contact_fraction.value < 0.01);
  CHECK(run_chain(g, pinning(0.0, 10.0), zero, s, 9).contact_fraction.value > 0.5);
  // On the tilde domain the 2N - 1 boundary sites at height 0 always count.
  const double floor_frac = (2.0 * 32 - 1) / (32.0 * 32);
  const double tilde = run_chain(g, pinning(0.0, -10.0, InteractionDomain::Tilde), zero, s, 9).contact_fraction.value;
  CHECK(tilde >= floor_frac);
  CHECK(tilde < floor_frac + 0.01);
}

TEST_CASE("contact fraction is nondecreasing in h") {
  const BoxGeometry g(8);
  const DisorderField w = sample_disorder(g, DisorderSpec::gaussian(), 12);
  double prev = -1.0, prev_se = 0.0;
  for (double h : {-1.0, -0.3, 0.0, 0.3, 1.0}) {
    const ChainResult r = run_chain(g, pinning(0.5, h), w, {20000, 500, 1}, 13);
    CHECK(r.contact_fraction.value > prev - 3 * std::hypot(r.contact_fraction.se, prev_se));
    prev = r.contact_fraction.value;
    prev_se = r.contact_fraction.se;
  }
}

TEST_CASE("energy bookkeeping and warm starts") {
  const BoxGeometry g(12);
  const DisorderField w = sample_disorder(g, DisorderSpec::bernoulli(), 2);
  PinningParams p = pinning(0.7, 0.1, InteractionDomain::Tilde);
  p.bc = BoundaryCondition::constant_value(0.5);
  p.u = 0.5;
  GibbsChain c(g, p, w, Rng(1, "e"));
  for (int t = 0; t < 200; ++t) c.sweep();
  CHECK_NOTHROW(c.check_energy(1e-9));
  CHECK(c.energy() == doctest::Approx(energy(g, c.field(), p, w)).epsilon(1e-10));
  p.h = 0.9;
  c.set_params(p);
  CHECK(c.energy() == doctest::Approx(energy(g, c.field(), p, w)).epsilon(1e-10));
  for (int b : g.boundary_sites()) CHECK(c.field()[b] == 0.5);
  std::vector<double> bad(g.size(), 0.0);
  CHECK_THROWS_AS(c.set_field(bad), ContractError);
  CHECK_THROWS_AS(run_chain(g, p, w, {0, 0, 1}, 1), ContractError);
}

TEST_CASE("copolymer with no disorder and h = 0 is symmetric") {
  const BoxGeometry g(16);
  PinningParams p;
  p.model = ModelKind::Copolymer;
  p.rho = 0.5;
  p.domain = InteractionDomain::Interior;
  const ChainResult r = run_chain(g, p, constant_disorder(g, 0.0), {4000, 200, 1}, 31);
  CHECK(std::abs(r.contact_fraction.value - 0.5) < 4 * r.contact_fraction.se);
}

TEST_CASE("restricted contacts") {
  const BoxGeometry g(32);
  const double m = 0.05;
  ScaleStackSampler sampler(g, scale_time_grid(m, unit_for_scale_count(m, 3)));
  Rng rng(17, "rc");
  const SubBox all{0, 32, 0, 32};
  int equal = 0;
  for (int i = 0; i < 50; ++i) {
    const FieldSample s = sampler.sample(rng);
    const RestrictedContacts rc = restricted_contacts(g, s, 0.0, all);
    CHECK(rc.L_prime <= rc.L);
    equal += rc.L_prime == rc.L;
    FieldSample bad = s;
    for (double& v : bad.stack->xi[0]) v = 20.0;
    for (double& v : bad.phi) v = 0.0;
    const RestrictedContacts adv = restricted_contacts(g, bad, 0.0, all);
    CHECK(adv.L_prime == 0);
    CHECK(adv.L == static_cast<std::int64_t>(g.size()));
  }
  CHECK(equal > 45);
  FieldSample plain = sample_dirichlet_field(g, m, 1);
  CHECK_THROWS_AS(restricted_contacts(g, plain, 0.0, all), ContractError);
}
