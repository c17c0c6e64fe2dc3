#include "gffpin/freeenergy.hpp"

#include <algorithm>
#include <cmath>

#include "gffpin/common.hpp"
#include "gffpin/kernels.hpp"
#include "gffpin/numerics.hpp"
#include "gffpin/parallel.hpp"

namespace gffpin {

namespace {

constexpr double kGamma = 5.0132565492620005;

// Mean and standard error over replicas; a single replica falls back to its
// own Monte-Carlo error.
void replica_summary(const std::vector<double>& v, double single_se, double& mean,
                     double& se, double& spread) {
  RunningStats st;
  for (double x : v) st.add(x);
  mean = st.mean();
  if (v.size() >= 2) {
    spread = st.stddev();
    se = st.sem();
  } else {
    spread = 0.0;
    se = single_se;
  }
}

FreeEnergyEstimate replica_ti(const DisorderSpec& spec, const PinningParams& target, int N,
                              int replicas, const TIConfig& cfg, std::uint64_t seed,
                              const std::string& tag) {
  if (N < 2) throw InvalidGeometry("free energy: N must be >= 2");
  if (replicas < 1) throw ContractError("free energy: replicas must be >= 1");
  const BoxGeometry g(N);
  const double n2 = static_cast<double>(N) * N;
  std::vector<LogZ> runs(replicas);
  parallel_for(replicas, [&](std::int64_t r) {
    DisorderField omega =
        target.beta == 0.0 ? constant_disorder(g, 0.0)
                           : sample_disorder(g, spec, derive_key(seed, tag + "-disorder", r));
    omega.spec = spec;
    GibbsChain chain(g, target, omega, Rng(seed, tag + "-chain", r));
    runs[r] = log_partition_ti(chain, target, cfg);
  });
  std::vector<double> vals;
  double tau = 0.5;
  for (const LogZ& lz : runs) {
    vals.push_back(lz.value / n2);
    tau = std::max(tau, lz.tau_max);
  }
  FreeEnergyEstimate e;
  replica_summary(vals, runs.back().se / n2, e.value, e.se, e.spread);
  e.N = N;
  e.params = target;
  e.method = "thermodynamic-integration";
  e.replicas = replicas;
  e.seed = seed;
  e.tau_max = tau;
  return e;
}

}  // namespace

LogZ log_partition_ti(GibbsChain& chain, const PinningParams& target, const TIConfig& cfg) {
  if (target.model != ModelKind::Pinning)
    throw Unsupported("thermodynamic integration: pinning model only");
  if (cfg.nodes < 1 || cfg.sched.sweeps < 2) throw ContractError("TI: invalid budget");
  LogZ out;
  if (target.beta == 0.0 && target.h == 0.0) {
    chain.set_params(target);
    return out;
  }
  const QuadRule q = gauss_legendre(cfg.nodes, 0.0, 1.0);
  double var = 0.0;
  std::vector<double> vals(static_cast<std::size_t>(cfg.sched.sweeps));
  for (int n = 0; n < cfg.nodes; ++n) {
    PinningParams p = target;
    p.beta = q.x[n] * target.beta;
    p.h = q.x[n] * target.h;
    chain.set_params(p);
    const DisorderSpec& spec = chain.disorder_spec();
    const double lp = target.beta == 0.0 ? 0.0 : log_mgf_d1(spec, p.beta);
    for (std::int64_t t = 0; t < cfg.sched.burn_in; ++t) chain.sweep();
    for (std::int64_t t = 0; t < cfg.sched.sweeps; ++t) {
      chain.sweep();
      const ChainObservation o = chain.observe();
      vals[t] = target.beta * (o.omega_contacts - lp * o.contacts) + target.h * o.contacts;
    }
    double tau = 0.5;
    const Estimate e = correlated_mean(vals, &tau);
    out.value += q.w[n] * e.value;
    var += q.w[n] * q.w[n] * e.se * e.se;
    out.tau_max = std::max(out.tau_max, tau);
  }
  chain.set_params(target);
  out.se = std::sqrt(var);
  return out;
}

HLeg h_leg_ti(GibbsChain& chain, const std::vector<double>& hgrid, const TIConfig& cfg) {
  if (hgrid.empty()) throw ContractError("h_leg_ti: empty grid");
  for (std::size_t j = 1; j < hgrid.size(); ++j)
    if (!(hgrid[j] > hgrid[j - 1])) throw ContractError("h_leg_ti: grid must increase");
  HLeg out;
  out.h = hgrid;
  out.cumulative.assign(hgrid.size(), 0.0);
  out.panel.assign(hgrid.size(), 0.0);
  out.panel_se.assign(hgrid.size(), 0.0);
  PinningParams p = chain.params();
  std::vector<double> vals(static_cast<std::size_t>(cfg.sched.sweeps));
  for (std::size_t j = 1; j < hgrid.size(); ++j) {
    const QuadRule q = gauss_legendre(cfg.nodes, hgrid[j - 1], hgrid[j]);
    double v = 0.0, var = 0.0;
    for (int n = 0; n < cfg.nodes; ++n) {
      p.h = q.x[n];
      chain.set_params(p);
      for (std::int64_t t = 0; t < cfg.sched.burn_in; ++t) chain.sweep();
      for (std::int64_t t = 0; t < cfg.sched.sweeps; ++t) {
        chain.sweep();
        vals[t] = chain.observe().contacts;
      }
      double tau = 0.5;
      const Estimate e = correlated_mean(vals, &tau);
      v += q.w[n] * e.value;
      var += q.w[n] * q.w[n] * e.se * e.se;
      out.tau_max = std::max(out.tau_max, tau);
    }
    out.panel[j] = v;
    out.panel_se[j] = std::sqrt(var);
    out.cumulative[j] = out.cumulative[j - 1] + v;
  }
  p.h = hgrid.back();
  chain.set_params(p);
  return out;
}

FreeEnergyEstimate pure_free_energy_estimate(int N, double h, const TIConfig& cfg,
                                             std::uint64_t seed, InteractionDomain domain) {
  PinningParams p;
  p.h = h;
  p.domain = domain;
  return replica_ti(DisorderSpec::gaussian(), p, N, 1, cfg, seed, "pure");
}

FreeEnergyEstimate annealed_free_energy(int N, double h, const TIConfig& cfg,
                                        std::uint64_t seed) {
  return pure_free_energy_estimate(N, h, cfg, seed);
}

FreeEnergyEstimate quenched_free_energy_estimate(const DisorderSpec& spec, double beta,
                                                 double h, int N, int replicas,
                                                 const TIConfig& cfg, std::uint64_t seed) {
  if (!(beta >= 0.0) || beta > spec.beta_bar) throw DomainError("quenched: beta outside [0, beta_bar]");
  PinningParams p;
  p.beta = beta;
  p.h = h;
  return replica_ti(spec, p, N, replicas, cfg, seed, "quenched");
}

FreeEnergyEstimate massive_shifted_free_energy_estimate(const DisorderSpec& spec,
                                                        double beta, double h, double m,
                                                        double u, int N, int replicas,
                                                        const TIConfig& cfg,
                                                        std::uint64_t seed) {
  if (!(m > 0.0)) throw DomainError("massive free energy: m must be > 0");
  PinningParams p;
  p.beta = beta;
  p.h = h;
  p.m = m;
  p.u = u;
  return replica_ti(spec, p, N, replicas, cfg, seed, "massive");
}

HGridResult free_energy_h_grid(const DisorderSpec& spec, double beta,
                               const std::vector<double>& hgrid, int N, int replicas,
                               const TIConfig& cfg, std::uint64_t seed) {
  if (hgrid.size() < 3) throw ContractError("h grid: need at least three points");
  if (replicas < 1) throw ContractError("h grid: replicas must be >= 1");
  const BoxGeometry g(N);
  const double n2 = static_cast<double>(N) * N;
  const std::size_t J = hgrid.size();
  std::vector<std::vector<double>> F(replicas), D2(replicas), inc(replicas);
  std::vector<double> single_se(J, 0.0), single_d2_se(J, 0.0), single_inc_se(J, 0.0);
  HGridResult out;
  out.h = hgrid;
  out.replicas = replicas;
  std::vector<double> taus(replicas, 0.5);
  parallel_for(replicas, [&](std::int64_t r) {
    DisorderField omega = beta == 0.0
                              ? constant_disorder(g, 0.0)
                              : sample_disorder(g, spec, derive_key(seed, "hgrid-disorder", r));
    omega.spec = spec;
    PinningParams p;
    p.beta = beta;
    p.h = hgrid[0];
    GibbsChain chain(g, p, omega, Rng(seed, "hgrid-chain", r));
    const LogZ z0 = log_partition_ti(chain, p, cfg);
    const HLeg leg = h_leg_ti(chain, hgrid, cfg);
    taus[r] = std::max(z0.tau_max, leg.tau_max);
    F[r].resize(J);
    D2[r].assign(J, 0.0);
    inc[r].assign(J, 0.0);
    double var = z0.se * z0.se;
    for (std::size_t j = 0; j < J; ++j) {
      if (j > 0) var += leg.panel_se[j] * leg.panel_se[j];
      F[r][j] = (z0.value + leg.cumulative[j]) / n2;
      if (r == 0) single_se[j] = std::sqrt(var) / n2;
      if (j > 0) {
        inc[r][j] = leg.panel[j] / n2;
        if (r == 0) single_inc_se[j] = leg.panel_se[j] / n2;
      }
      if (j > 0 && j + 1 < J) {
        // Uniform or not, convexity is the slope increase between panels.
        const double s1 = leg.panel[j] / (hgrid[j] - hgrid[j - 1]);
        const double s2 = leg.panel[j + 1] / (hgrid[j + 1] - hgrid[j]);
        const double e1 = leg.panel_se[j] / (hgrid[j] - hgrid[j - 1]);
        const double e2 = leg.panel_se[j + 1] / (hgrid[j + 1] - hgrid[j]);
        D2[r][j] = (s2 - s1) / n2;
        if (r == 0) single_d2_se[j] = std::sqrt(e1 * e1 + e2 * e2) / n2;
      }
    }
  });
  for (double t : taus) out.tau_max = std::max(out.tau_max, t);
  out.value.resize(J);
  out.se.resize(J);
  out.second_diff.assign(J, 0.0);
  out.second_diff_se.assign(J, 0.0);
  out.increment.assign(J, 0.0);
  out.increment_se.assign(J, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    std::vector<double> a(replicas), b(replicas), c(replicas);
    for (int r = 0; r < replicas; ++r) {
      a[r] = F[r][j];
      b[r] = D2[r][j];
      c[r] = inc[r][j];
    }
    double spread;
    replica_summary(a, single_se[j], out.value[j], out.se[j], spread);
    replica_summary(b, single_d2_se[j], out.second_diff[j], out.second_diff_se[j], spread);
    replica_summary(c, single_inc_se[j], out.increment[j], out.increment_se[j], spread);
  }
  return out;
}

// ---- Events -------------------------------------------------------------------

bool event_D(const BoxGeometry& g, const std::vector<double>& full_field, double m,
             double K, double f_m) {
  double s = 0.0;
  for (int x : g.tilde_sites()) s += full_field[x] * full_field[x];
  const double n2 = static_cast<double>(g.N()) * g.N();
  return s >= n2 * (2.0 * f_m / (m * m) - K);
}

EventFlags event_flags(const BoxGeometry& g, const FieldSample& sample,
                       const EventThresholds& t) {
  if (sample.phi.size() != g.size()) throw ContractError("event_flags: size mismatch");
  EventFlags ef;
  const int N = g.N();
  const double n2 = static_cast<double>(N) * N;
  const double logN = std::log(static_cast<double>(N));
  std::vector<double> full(g.size());
  for (std::size_t x = 0; x < g.size(); ++x) full[x] = sample.phi[x] + sample.h_at(static_cast<int>(x));

  for (std::size_t x = 0; x < g.size(); ++x) {
    ef.max_abs = std::max(ef.max_abs, std::abs(full[x]));
    ef.sum_sq_full += full[x] * full[x];
  }
  for (int x : g.tilde_sites()) ef.sum_sq_tilde += full[x] * full[x];
  if (t.h > 0.0 && t.h < 1.0) {
    const double lh = std::log(t.h);
    ef.A_h = ef.max_abs <= lh * lh;
  }
  if (t.m > 0.0) {
    const double fm = std::isnan(t.f_m) ? f_of_m(t.m) : t.f_m;
    ef.D0 = ef.sum_sq_full >= n2 * (fm / (t.m * t.m) - t.K);
    ef.D = ef.sum_sq_tilde >= n2 * (2.0 * fm / (t.m * t.m) - t.K);
  }

  const SubBox inner = scaled_inner_box(g, t.inner_exponent);
  for (int x : g.tilde_sites()) {
    const bool contact = std::abs(full[x] - t.u) <= 1.0;
    if (!contact) continue;
    if (inner.contains(g.site(x)))
      ef.L_N += 1.0;
    else
      ef.frame_contacts += 1.0;
  }

  if (sample.stack) {
    const ScaleStack& st = *sample.stack;
    const int k = st.k();
    const ScaleIndex j = scale_index(g, std::max(k, 1), t.unit);
    const SubBox dprime = scaled_inner_box(g, t.inner_double_exponent);
    bool ok = true;
    double worst = -std::numeric_limits<double>::infinity();
    for (int x : dprime.sites(g)) {
      double run = 0.0;
      const int jx = j(x);
      for (int i = 1; i <= k; ++i) {
        run += st.xi[i - 1][x];
        if (i < jx) continue;
        const double excess = run - (t.gamma * t.unit * (i - jx) + t.A_offset);
        worst = std::max(worst, excess);
        if (excess > 0.0) ok = false;
      }
    }
    ef.A = ok;
    ef.A_worst = worst;
  }
  if (!std::isnan(t.frame_reference))
    ef.C_prime = ef.frame_contacts <= std::pow(logN, 1.0 / 16.0) * t.frame_reference;
  if (ef.D && ef.C_prime) {
    ef.C = *ef.D && *ef.C_prime;
    ef.B = *ef.C && ef.L_N <= std::pow(logN, 0.5 * (t.alpha + 1.0));
  }
  return ef;
}

// ---- Finite-volume criterion ----------------------------------------------------

namespace {

RestrictedLogZ restricted_replica(const BoxGeometry& g, const InfiniteBoundarySampler& bs,
                                  const DisorderSpec& spec, double beta, double h, double m,
                                  double u, double K, double fm, const TIConfig& cfg,
                                  std::uint64_t seed, std::uint64_t replica) {
  Rng brng(seed, "restricted-boundary", replica);
  PinningParams p;
  p.beta = beta;
  p.h = h;
  p.m = m;
  p.u = u;
  p.bc = bs.sample(brng, seed);
  DisorderField omega = sample_disorder(g, spec, derive_key(seed, "restricted-disorder", replica));
  GibbsChain chain(g, p, omega, Rng(seed, "restricted-chain", replica));
  // Start from the harmonic extension rather than a flat interior.
  chain.set_field(harmonic_extension(g, m, p.bc).H);
  const LogZ lz = log_partition_ti(chain, p, cfg);
  for (std::int64_t t = 0; t < cfg.sched.burn_in; ++t) chain.sweep();
  std::vector<double> ind(static_cast<std::size_t>(cfg.sched.sweeps));
  for (std::int64_t t = 0; t < cfg.sched.sweeps; ++t) {
    chain.sweep();
    ind[t] = event_D(g, chain.field(), m, K, fm) ? 1.0 : 0.0;
  }
  const Estimate pd = correlated_mean(ind);
  RestrictedLogZ out;
  out.pD = pd.value;
  double pd_used = pd.value, pd_se = pd.se;
  if (pd.value <= 0.0) {
    out.D_never_seen = true;
    pd_used = 0.5 / static_cast<double>(ind.size());
    pd_se = pd_used;
  }
  out.log_pD = std::log(pd_used);
  out.log_z = lz.value + out.log_pD;
  const double rel = pd_se / pd_used;
  out.log_z_se = std::sqrt(lz.se * lz.se + rel * rel);
  return out;
}

}  // namespace

RestrictedLogZ restricted_log_partition(const BoxGeometry& g, const DisorderSpec& spec,
                                        double beta, double h, double m, double u,
                                        double K, const TIConfig& cfg,
                                        std::uint64_t seed, std::uint64_t replica) {
  if (!(m > 0.0)) throw DomainError("restricted partition function: m must be > 0");
  const InfiniteBoundarySampler bs(g, m);
  return restricted_replica(g, bs, spec, beta, h, m, u, K, f_of_m(m), cfg, seed, replica);
}

CriterionReport finite_volume_criterion(const DisorderSpec& spec, double beta, double h,
                                        double m, double u, double K, int N,
                                        int replicas, const TIConfig& cfg,
                                        std::uint64_t seed) {
  if (!(m > 0.0)) throw DomainError("finite_volume_criterion: m must be > 0");
  if (replicas < 1) throw ContractError("finite_volume_criterion: replicas must be >= 1");
  const BoxGeometry g(N);
  const InfiniteBoundarySampler bs(g, m);
  const double fm = f_of_m(m);
  const double n2 = static_cast<double>(N) * N;
  std::vector<RestrictedLogZ> runs(replicas);
  parallel_for(replicas, [&](std::int64_t r) {
    runs[r] = restricted_replica(g, bs, spec, beta, h, m, u, K, fm, cfg, seed, r);
  });
  std::vector<double> vals;
  double single_se = 0.0, lpd = 0.0;
  CriterionReport rep;
  for (const RestrictedLogZ& z : runs) {
    vals.push_back(z.log_z / n2);
    single_se = z.log_z_se / n2;
    lpd += z.log_pD / replicas;
    if (z.D_never_seen) ++rep.replicas_without_D;
  }
  double spread;
  replica_summary(vals, single_se, rep.estimate, rep.se, spread);
  rep.N = N;
  rep.m = m;
  rep.u = u;
  rep.K = K;
  rep.beta = beta;
  rep.h = h;
  rep.penalty = K * m * m;
  rep.margin = rep.estimate - rep.penalty;
  rep.positive = rep.margin > 3.0 * rep.se;
  rep.mean_log_pD = lpd;
  rep.replicas = replicas;
  return rep;
}

// ---- Schedules --------------------------------------------------------------------

ParameterSchedule parameter_schedule(double h) {
  if (!(h > 0.0 && h < 1.0)) throw DomainError("parameter_schedule: h must lie in (0,1)");
  ParameterSchedule s;
  s.h = h;
  s.gamma = kGamma;
  s.log_N = std::pow(h, -20.0);
  const double llN = std::log(s.log_N);
  s.log_m = -s.log_N + 0.25 * llN;
  s.u = std::sqrt(2.0 / kPi) * s.log_N - (2.0 + s.alpha) / (2.0 * std::sqrt(2.0 * kPi)) * llN;
  s.log_lower = -s.log_N;
  s.log_upper = -std::pow(std::abs(std::log(h)), 1.5);
  return s;
}

double desk_u(double N, double alpha) {
  const double L = std::log(N);
  return std::sqrt(2.0 / kPi) * L - (2.0 + alpha) / (2.0 * std::sqrt(2.0 * kPi)) * std::log(L);
}

double desk_m(double N) { return std::pow(std::log(N), 0.25) / N; }

double copolymer_critical_point(const DisorderSpec& spec, double rho) {
  if (!(rho > 0.0) || !(rho < 0.5 * spec.beta_bar))
    throw DomainError("copolymer_critical_point: rho outside (0, beta_bar/2)");
  return log_mgf(spec, -2.0 * rho) / (2.0 * rho);
}

// ---- Conditioned contact statistics -------------------------------------------------

ContactStatistics conditioned_contact_statistics(const ContactStatsConfig& cfg,
                                                 std::uint64_t seed) {
  const BoxGeometry g(cfg.N);
  const double N = cfg.N;
  const double logN = std::log(N);
  const double m = cfg.m > 0.0 ? cfg.m : desk_m(N);
  const double u = cfg.u >= 0.0 ? cfg.u : desk_u(N, cfg.alpha);
  const double unit = unit_for_scale_count(m, cfg.k_target);
  const ScaleTimeGrid grid = scale_time_grid(m, unit, 1);
  const ScaleStackSampler stack_sampler(g, grid);
  const InfiniteBoundarySampler bsampler(g, m);
  const HarmonicSolver solver(g, m);
  const SubBox inner = scaled_inner_box(g, cfg.inner_exponent);

  EventThresholds th;
  th.m = m;
  th.K = cfg.K;
  th.u = u;
  th.alpha = cfg.alpha;
  th.unit = unit;
  th.inner_exponent = cfg.inner_exponent;
  th.A_offset = cfg.A_offset >= 0.0 ? cfg.A_offset : kGamma * std::log(logN);
  th.f_m = f_of_m(m);

  struct Row {
    bool A, D;
    double frame, L, Lp;
  };
  std::vector<Row> rows;
  Rng frng(seed, "contact-stats-field");
  Rng brng(seed, "contact-stats-boundary");
  for (std::int64_t s = 0; s < cfg.samples; ++s) {
    FieldSample fs = stack_sampler.sample(frng);
    const BoundaryCondition bc = bsampler.sample(brng, seed);
    fs.H = solver.solve(bc).H;
    fs.bc = bc;
    const EventFlags ef = event_flags(g, fs, th);
    const RestrictedContacts rc = restricted_contacts(g, fs, u, inner);
    rows.push_back({ef.A.value_or(false), ef.D.value_or(false), ef.frame_contacts,
                    static_cast<double>(rc.L), static_cast<double>(rc.L_prime)});
  }
  ContactStatistics out;
  out.k = grid.k;
  out.unit = unit;
  out.samples = cfg.samples;
  RunningStats frameA, L, Lp, Lp2, LB;
  std::int64_t nA = 0, nB = 0;
  for (const Row& r : rows) {
    if (r.A) {
      frameA.add(r.frame);
      ++nA;
    }
    L.add(r.L);
    Lp.add(r.Lp);
    Lp2.add(r.Lp * r.Lp);
  }
  out.frame_reference = frameA.mean();
  const double cap = std::pow(logN, 1.0 / 16.0) * out.frame_reference;
  const double Lcap = std::pow(logN, 0.5 * (cfg.alpha + 1.0));
  for (const Row& r : rows) {
    const bool B = r.D && r.frame <= cap && r.L <= Lcap;
    if (B) {
      LB.add(r.L);
      ++nB;
    }
  }
  const double ns = static_cast<double>(rows.size());
  out.freq_A = nA / ns;
  out.freq_B = nB / ns;
  out.L = {L.mean(), L.sem(), L.count()};
  out.L_prime = {Lp.mean(), Lp.sem(), Lp.count()};
  out.L_prime_sq = {Lp2.mean(), Lp2.sem(), Lp2.count()};
  out.L_given_B = {LB.mean(), LB.count() > 1 ? LB.sem() : 0.0, LB.count()};
  out.second_moment_ratio =
      Lp.mean() > 0.0 ? Lp2.mean() / (Lp.mean() * Lp.mean()) : std::numeric_limits<double>::infinity();

  out.j_histogram.assign(static_cast<std::size_t>(grid.k) + 1, 0);
  const auto sites = inner.sites(g);
  if (sites.size() >= 2) {
    Rng prng(seed, "contact-stats-pairs");
    for (std::int64_t s = 0; s < cfg.pair_samples; ++s) {
      const Site a = g.site(sites[prng.next_u64() % sites.size()]);
      const Site b = g.site(sites[prng.next_u64() % sites.size()]);
      const int d = std::abs(a.x1 - b.x1) + std::abs(a.x2 - b.x2);
      if (d == 0) continue;
      ++out.j_histogram[pair_scale_index(grid.k, d, unit)];
    }
  }
  return out;
}

}  // namespace gffpin
