#include <cmath>

#include "doctest.h"

#include "gffpin/disorder.hpp"
#include "gffpin/lattice.hpp"
#include "gffpin/stats.hpp"

using namespace gffpin;

TEST_CASE("log moment generating functions in closed form") {
  const auto gs = DisorderSpec::gaussian();
  const auto bs = DisorderSpec::bernoulli();
  for (double b : {-1.3, -0.2, 0.0, 0.4, 2.5}) {
    CHECK(log_mgf(gs, b) == doctest::Approx(0.5 * b * b).epsilon(1e-15));
    CHECK(log_mgf(bs, b) == doctest::Approx(std::log(std::cosh(b))).epsilon(1e-14));
    CHECK(log_mgf_d1(bs, b) == doctest::Approx(std::tanh(b)).epsilon(1e-14));
    CHECK(chi(gs, b) == doctest::Approx(b * b).epsilon(1e-14));
    CHECK(chi(bs, b) == doctest::Approx(std::log(std::cosh(2 * b)) - 2 * std::log(std::cosh(b))).epsilon(1e-12));
  }
  CHECK(log_mgf(bs, 800.0) == doctest::Approx(800.0 - std::log(2.0)));
  CHECK(gs.mean() == 0.0);
  CHECK(gs.variance() == 1.0);
  CHECK(bs.variance() == 1.0);
}

TEST_CASE("tabulated law matches Bernoulli and finite differences") {
  const auto t = DisorderSpec::tabulated({-1.0, 1.0}, {1.0, 1.0});
  const auto bs = DisorderSpec::bernoulli();
  for (double b : {-0.7, 0.1, 1.9}) {
    CHECK(log_mgf(t, b) == doctest::Approx(log_mgf(bs, b)).epsilon(1e-14));
    CHECK(log_mgf_d2(t, b) == doctest::Approx(log_mgf_d2(bs, b)).epsilon(1e-12));
  }
  const auto s = DisorderSpec::tabulated({-2.0, 0.0, 1.0}, {1.0, 2.0, 2.0});
  CHECK(s.mean() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(s.variance() == doctest::Approx(1.2));
  for (double b : {-0.5, 0.3, 1.0}) {
    const double h = 1e-5;
    CHECK(log_mgf_d1(s, b) == doctest::Approx((log_mgf(s, b + h) - log_mgf(s, b - h)) / (2 * h)).epsilon(1e-8));
    CHECK(log_mgf_d2(s, b) == doctest::Approx((log_mgf_d1(s, b + h) - log_mgf_d1(s, b - h)) / (2 * h)).epsilon(1e-7));
  }
  CHECK_THROWS_AS(DisorderSpec::tabulated({1.0, 2.0}, {1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(DisorderSpec::tabulated({0.0}, {1.0}), ConfigError);
  CHECK_THROWS_AS(DisorderSpec::tabulated({-1.0, 1.0}, {1.0}), ConfigError);
  CHECK(parse_disorder_kind("bernoulli") == DisorderKind::Bernoulli);
  CHECK_THROWS_AS(parse_disorder_kind("cauchy"), ConfigError);
}

TEST_CASE("disorder sampling is reproducible and local") {
  const BoxGeometry g(20), h(30);
  const auto spec = DisorderSpec::gaussian();
  const DisorderField a = sample_disorder(g, spec, 5), b = sample_disorder(g, spec, 5);
  const DisorderField c = sample_disorder(g, spec, 6), big = sample_disorder(h, spec, 5);
  CHECK(a.omega == b.omega);
  CHECK(a.omega != c.omega);
  for (int idx = 0; idx < static_cast<int>(g.size()); ++idx) {
    const Site s = g.site(idx);
    if (g.in_tilde(idx))
      CHECK(a[idx] == big[h.index(s)]);
    else
      CHECK(a[idx] == 0.0);
  }
  const DisorderField bern = sample_disorder(h, DisorderSpec::bernoulli(), 1);
  RunningStats st;
  for (int idx : h.tilde_sites()) {
    CHECK(std::abs(bern[idx]) == 1.0);
    st.add(bern[idx]);
  }
  CHECK(std::abs(st.mean()) < 4 * st.sem());
}

TEST_CASE("tilted resampling has mean lambda'(beta) on contacts") {
  const BoxGeometry g(60);
  std::vector<char> contacts(g.size(), 0);
  for (int idx : g.tilde_sites())
    if (idx % 2 == 0) contacts[idx] = 1;
  const double beta = 0.6;
  for (const auto& spec : {DisorderSpec::gaussian(), DisorderSpec::bernoulli(),
                           DisorderSpec::tabulated({-2.0, 0.0, 1.0}, {1.0, 2.0, 2.0})}) {
    const DisorderField w = sample_disorder(g, spec, 8);
    const DisorderField t = tilted_resample(g, w, contacts, beta, 9);
    RunningStats on;
    for (int idx : g.tilde_sites()) {
      if (contacts[idx])
        on.add(t[idx]);
      else
        CHECK(t[idx] == w[idx]);
    }
    CHECK(std::abs(on.mean() - log_mgf_d1(spec, beta)) < 4 * on.sem());
  }
}

TEST_CASE("cell event E") {
  const BoxGeometry g(64);
  const SubBox cell{17, 32, 17, 32};
  const auto p = default_E_params(DisorderSpec::gaussian(), 1.0, 16);
  CHECK(p.radius == static_cast<int>(std::floor(std::pow(std::log(16.0), 2))));
  CHECK(p.threshold == doctest::Approx(0.5 * std::pow(std::log(16.0), 3)));
  CHECK_FALSE(event_E_cell(g, constant_disorder(g, 0.0), cell, p).value);
  CHECK(event_E_cell(g, constant_disorder(g, 10.0), cell, p).value);
  // Monotone: raising omega can only switch the event on.
  const DisorderField w = sample_disorder(g, DisorderSpec::gaussian(), 3);
  bool prev = false;
  for (double shift : {-1.0, -0.5, 0.0, 0.25, 0.5, 1.0, 2.0}) {
    DisorderField s = w;
    for (int idx : g.tilde_sites()) s.omega[idx] += shift;
    const bool v = event_E_cell(g, s, cell, p).value;
    CHECK((!prev || v));
    prev = v;
  }
}

TEST_CASE("max window sum against brute force") {
  const BoxGeometry g(20);
  const DisorderField w = sample_disorder(g, DisorderSpec::gaussian(), 4);
  const SubBox cell{3, 11, 5, 16};
  for (int r : {0, 1, 3, 7}) {
    double best = -1e300;
    std::int64_t largest = 0;
    for (int a = cell.lo1; a <= cell.hi1; ++a)
      for (int b = cell.lo2; b <= cell.hi2; ++b) {
        double s = 0.0;
        std::int64_t n = 0;
        for (int c = cell.lo1; c <= cell.hi1; ++c)
          for (int d = cell.lo2; d <= cell.hi2; ++d)
            if (std::abs(a - c) + std::abs(b - d) <= r) {
              s += w[g.index(c, d)];
              ++n;
            }
        best = std::max(best, s);
        largest = std::max(largest, n);
      }
    CHECK(max_window_sum(g, w.omega, cell, r) == doctest::Approx(best).epsilon(1e-12));
    CHECK(max_window_size(cell, r) == largest);
  }
}

TEST_CASE("cell event C and its structural flag") {
  const BoxGeometry g(64);
  const SubBox small{1, 4, 1, 4};
  const auto p = default_C_params(4);
  std::vector<char> all(g.size(), 1), none(g.size(), 0);
  // (log 4)^3 = 2.66 with radius 1: a window holds at most 5 sites.
  CHECK_FALSE(event_C_cell(g, all, small, p).structurally_false);
  CHECK(event_C_cell(g, all, small, p).value);
  CHECK_FALSE(event_C_cell(g, none, small, p).value);
  const SubBox cell{17, 32, 17, 32};
  const auto q = default_C_params(16);
  const CellEvent e = event_C_cell(g, all, cell, q);
  CHECK(e.structurally_false == (static_cast<double>(max_window_size(cell, q.radius)) < q.threshold));
  CellEventParams huge{2, 100.0};
  const CellEvent f = event_C_cell(g, all, cell, huge);
  CHECK(f.structurally_false);
  CHECK_FALSE(f.value);
}

TEST_CASE("penalty factor counts triggered cells") {
  const BoxGeometry g(16);
  const CellTiling t = cell_tiling(g, 4);  // 9 cells
  DisorderField w = constant_disorder(g, 0.0);
  const CellEventParams p{1, 3.0};
  CHECK(penalty_f(g, w, t, p).value == 1.0);
  for (int c : {0, 4, 8})
    for (int idx : t.cells[c].cell.sites(g)) w.omega[idx] = 5.0;
  const Penalty pen = penalty_f(g, w, t, p);
  CHECK(pen.triggered == 3);
  CHECK(pen.value == doctest::Approx(std::exp(-6.0)).epsilon(1e-15));
  CHECK(pen.per_cell[4] == 1);
  CHECK(pen.per_cell[1] == 0);
}
