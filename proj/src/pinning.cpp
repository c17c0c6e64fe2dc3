#include "gffpin/pinning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "gffpin/common.hpp"
#include "gffpin/numerics.hpp"

namespace gffpin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double phi_density(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }

// Standard normal mass of [a,b] by adaptive quadrature, clipped to |z| <= 40.
double quad_mass(double a, double b) {
  a = std::max(a, -40.0);
  b = std::min(b, 40.0);
  if (!(b > a)) return 0.0;
  return integrate_adaptive(phi_density, a, b, 1e-14);
}

// Breakpoints in standard units for the region of a N(mu, sd^2) variable.
struct Split {
  double a, b;  // region is [a,b] in z
};

Split split_of(const Region& r, double mu, double sd) {
  return {(r.lo - mu) / sd, (r.hi - mu) / sd};
}

double mass1d(double mu, double sd, double s, const Region& r) {
  const Split sp = split_of(r, mu, sd);
  const double in = quad_mass(sp.a, sp.b);
  const double out = quad_mass(-kInf, sp.a) + quad_mass(sp.b, kInf);
  return std::exp(s) * in + out;
}

}  // namespace

ModelKind parse_model_kind(const std::string& s) {
  if (s == "pinning") return ModelKind::Pinning;
  if (s == "copolymer") return ModelKind::Copolymer;
  throw ConfigError("unknown model kind: " + s);
}

InteractionDomain parse_domain(const std::string& s) {
  if (s == "tilde") return InteractionDomain::Tilde;
  if (s == "interior") return InteractionDomain::Interior;
  if (s == "full") return InteractionDomain::Full;
  if (s == "inner-prime") return InteractionDomain::InnerPrime;
  throw ConfigError("unknown interaction domain: " + s);
}

std::string to_string(InteractionDomain d) {
  switch (d) {
    case InteractionDomain::Tilde: return "tilde";
    case InteractionDomain::Interior: return "interior";
    case InteractionDomain::Full: return "full";
    default: return "inner-prime";
  }
}

std::vector<int> interaction_sites(const BoxGeometry& g, InteractionDomain d,
                                   double inner_exponent) {
  switch (d) {
    case InteractionDomain::Tilde: return g.tilde_sites();
    case InteractionDomain::Interior: return g.interior_sites();
    case InteractionDomain::Full: {
      std::vector<int> all(g.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
      return all;
    }
    default: return scaled_inner_box(g, inner_exponent).sites(g);
  }
}

std::vector<double> site_weights(const BoxGeometry& g, const PinningParams& p,
                                 const DisorderField& omega) {
  if (omega.omega.size() != g.size()) throw ContractError("site_weights: disorder size mismatch");
  std::vector<double> s(g.size(), 0.0);
  const double lam = p.model == ModelKind::Pinning ? log_mgf(omega.spec, p.beta) : 0.0;
  for (int x : interaction_sites(g, p.domain, p.inner_exponent)) {
    if (p.model == ModelKind::Pinning)
      s[x] = p.beta * omega.omega[x] - lam + p.h;
    else
      s[x] = -2.0 * p.rho * (omega.omega[x] + p.h);
  }
  return s;
}

Region interaction_region(const PinningParams& p) {
  if (p.model == ModelKind::Pinning) return {p.u - 1.0, p.u + 1.0, false};
  return {-kInf, 0.0, true};
}

std::vector<char> contact_indicator(const std::vector<double>& phi, double u) {
  std::vector<char> d(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i)
    d[i] = (phi[i] >= u - 1.0 && phi[i] <= u + 1.0) ? 1 : 0;
  return d;
}

std::vector<char> negative_indicator(const std::vector<double>& phi) {
  std::vector<char> d(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) d[i] = phi[i] < 0.0 ? 1 : 0;
  return d;
}

std::vector<double> initial_field(const BoxGeometry& g, const BoundaryCondition& bc) {
  bc.validate(g);
  std::vector<double> phi(g.size(), 0.0);
  const auto& bs = g.boundary_sites();
  for (std::size_t s = 0; s < bs.size(); ++s) phi[bs[s]] = bc.value(static_cast<int>(s));
  return phi;
}

double energy(const BoxGeometry& g, const std::vector<double>& phi,
              const PinningParams& p, const DisorderField& omega) {
  if (phi.size() != g.size()) throw ContractError("energy: field size mismatch");
  const auto s = site_weights(g, p, omega);
  const Region r = interaction_region(p);
  double e = 0.0;
  for (int x : interaction_sites(g, p.domain, p.inner_exponent))
    if (r.contains(phi[x])) e += s[x];
  return e;
}

// ---- Gibbs chain ----------------------------------------------------------

GibbsChain::GibbsChain(const BoxGeometry& g, const PinningParams& p,
                       const DisorderField& omega, Rng rng)
    : g_(g), p_(p), omega_(omega), rng_(rng) {
  if (!(p.m >= 0.0)) throw DomainError("GibbsChain: m must be >= 0");
  phi_ = initial_field(g, p.bc);
  set_params(p);
}

void GibbsChain::set_params(const PinningParams& p) {
  if (!(p.m >= 0.0)) throw DomainError("GibbsChain: m must be >= 0");
  p_ = p;
  s_ = site_weights(g_, p_, omega_);
  domain_ = interaction_sites(g_, p_.domain, p_.inner_exponent);
  region_ = interaction_region(p_);
  prec_ = 4.0 + p_.m * p_.m;
  sigma_ = 1.0 / std::sqrt(prec_);
  energy_ = gffpin::energy(g_, phi_, p_, omega_);
}

void GibbsChain::set_field(std::vector<double> phi) {
  if (phi.size() != g_.size()) throw ContractError("GibbsChain::set_field: size mismatch");
  const auto ref = initial_field(g_, p_.bc);
  for (int b : g_.boundary_sites())
    if (phi[b] != ref[b]) throw ContractError("GibbsChain::set_field: boundary values differ");
  phi_ = std::move(phi);
  energy_ = gffpin::energy(g_, phi_, p_, omega_);
}

void GibbsChain::update_site(int x) {
  double nb = 0.0;
  for (int y : g_.neighbors(x)) nb += phi_[y];
  const double mu = nb / prec_;
  const double s = s_[x];
  if (s == 0.0) {
    phi_[x] = mu + sigma_ * rng_.normal();
    return;
  }
  const bool was_in = region_.contains(phi_[x]);
  const double a = (region_.lo - mu) / sigma_;
  const double b = (region_.hi - mu) / sigma_;
  const double p_in = normal_mass(a, b);
  const double p_lo = std::isinf(a) ? 0.0 : normal_cdf(a);
  const double p_hi = normal_sf(b);
  const double p_out = p_lo + p_hi;
  // P(inside) = e^s p_in / (e^s p_in + p_out), evaluated in log space.
  double q;
  if (p_in <= 0.0) {
    q = 0.0;
  } else if (p_out <= 0.0) {
    q = 1.0;
  } else {
    q = 1.0 / (1.0 + std::exp(std::log(p_out) - std::log(p_in) - s));
  }
  double z;
  if (rng_.uniform() < q) {
    z = sample_truncated_normal(a, b, rng_);
  } else if (rng_.uniform() * p_out < p_lo) {
    z = sample_truncated_normal(-kInf, a, rng_);
  } else {
    z = sample_truncated_normal(b, kInf, rng_);
  }
  const double v = mu + sigma_ * z;
  const bool now_in = region_.contains(v);
  phi_[x] = v;
  if (now_in != was_in) energy_ += now_in ? s : -s;
}

void GibbsChain::sweep() {
  for (int x : g_.interior_sites()) update_site(x);
  ++sweeps_;
}

void GibbsChain::check_energy(double tol) {
  const double e = gffpin::energy(g_, phi_, p_, omega_);
  if (std::abs(e - energy_) > tol * std::max(1.0, std::abs(e)))
    throw ContractError("GibbsChain: energy bookkeeping drifted");
  energy_ = e;
}

ChainObservation GibbsChain::observe() const {
  ChainObservation o;
  o.sweep = sweeps_;
  for (int x : domain_) {
    if (region_.contains(phi_[x])) {
      o.contacts += 1.0;
      o.omega_contacts += omega_.omega[x];
    }
  }
  o.contact_fraction = domain_.empty() ? 0.0 : o.contacts / static_cast<double>(domain_.size());
  o.energy = energy_;
  return o;
}

ChainResult run_chain(const BoxGeometry& g, const PinningParams& p,
                      const DisorderField& omega, const ChainSchedule& sched,
                      std::uint64_t seed, std::uint64_t replica) {
  if (sched.burn_in < 0 || sched.sweeps < 1 || sched.thin < 1)
    throw ContractError("run_chain: invalid schedule");
  GibbsChain chain(g, p, omega, Rng(seed, "gibbs-chain", replica));
  for (std::int64_t t = 0; t < sched.burn_in; ++t) chain.sweep();
  ChainResult res;
  std::vector<double> frac, cnt;
  for (std::int64_t t = 1; t <= sched.sweeps; ++t) {
    chain.sweep();
    if (chain.sweeps() % 1000 == 0) chain.check_energy();
    if (t % sched.thin == 0) {
      res.stream.push_back(chain.observe());
      frac.push_back(res.stream.back().contact_fraction);
      cnt.push_back(res.stream.back().contacts);
    }
  }
  res.contact_fraction = correlated_mean(frac, &res.tau);
  res.contacts = correlated_mean(cnt);
  res.final_field = chain.field();
  return res;
}

// ---- Exact small systems --------------------------------------------------

double gaussian_weighted_log_mass(const std::vector<double>& mean,
                                  const std::vector<std::vector<double>>& cov,
                                  const std::vector<double>& s, const Region& region) {
  const std::size_t d = mean.size();
  if (d == 0) return 0.0;
  if (d > 2) throw Unsupported("exact partition: more than two interior sites");
  // Unit weights: the Gaussian integrates to one exactly.
  if (std::all_of(s.begin(), s.end(), [](double v) { return v == 0.0; })) return 0.0;
  if (d == 1) {
    const double sd = std::sqrt(cov[0][0]);
    const Split sp = split_of(region, mean[0], sd);
    const double in = quad_mass(sp.a, sp.b);
    const double out = quad_mass(-kInf, sp.a) + quad_mass(sp.b, kInf);
    if (in <= 0.0) return std::log(out);
    if (out <= 0.0) return s[0] + std::log(in);
    return s[0] > 0.0 ? s[0] + std::log(in + std::exp(-s[0]) * out)
                      : std::log(std::exp(s[0]) * in + out);
  }
  const double sd1 = std::sqrt(cov[0][0]);
  const double beta21 = cov[1][0] / cov[0][0];
  const double var2 = cov[1][1] - cov[1][0] * cov[1][0] / cov[0][0];
  if (!(var2 > 0.0)) throw NumericError("exact partition: degenerate covariance");
  const double sd2 = std::sqrt(var2);
  auto integrand = [&](double z, double w1) {
    const double phi1 = mean[0] + sd1 * z;
    return phi_density(z) * w1 * mass1d(mean[1] + beta21 * (phi1 - mean[0]), sd2, s[1], region);
  };
  const Split sp = split_of(region, mean[0], sd1);
  auto piece = [&](double a, double b, double w1) {
    a = std::max(a, -40.0);
    b = std::min(b, 40.0);
    if (!(b > a)) return 0.0;
    return integrate_adaptive([&](double z) { return integrand(z, w1); }, a, b, 1e-13);
  };
  const double z = piece(-kInf, sp.a, 1.0) + piece(sp.a, sp.b, std::exp(s[0])) +
                   piece(sp.b, kInf, 1.0);
  return std::log(z);
}

double exact_partition_small(const BoxGeometry& g, const PinningParams& p,
                             const DisorderField& omega) {
  const auto& interior = g.interior_sites();
  const int d = static_cast<int>(interior.size());
  if (d > 2) throw Unsupported("exact_partition_small: more than two interior sites");
  const std::vector<double> phi0 = initial_field(g, p.bc);
  const auto s = site_weights(g, p, omega);
  const Region r = interaction_region(p);
  // Fixed boundary sites of the domain contribute a constant.
  double logc = 0.0;
  for (int x : interaction_sites(g, p.domain, p.inner_exponent))
    if (g.is_boundary(x) && r.contains(phi0[x])) logc += s[x];
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < d; ++i) {
    Q(i, i) = 4.0 + p.m * p.m;
    for (int y : g.neighbors(interior[i])) {
      const int j = g.interior_slot(y);
      if (j >= 0)
        Q(i, j) -= 1.0;
      else
        b[i] += phi0[y];
    }
  }
  const Eigen::MatrixXd C = Q.inverse();
  const Eigen::VectorXd mu = C * b;
  std::vector<double> mean(d), sv(d);
  std::vector<std::vector<double>> cov(d, std::vector<double>(d));
  for (int i = 0; i < d; ++i) {
    mean[i] = mu[i];
    sv[i] = s[interior[i]];
    for (int j = 0; j < d; ++j) cov[i][j] = C(i, j);
  }
  return logc + gaussian_weighted_log_mass(mean, cov, sv, r);
}

// ---- Restricted contacts --------------------------------------------------

RestrictedContacts restricted_contacts(const BoxGeometry& g, const FieldSample& sample,
                                       double u, const SubBox& region, double offset) {
  if (!sample.stack) throw ContractError("restricted_contacts: sample carries no scale stack");
  if (sample.phi.size() != g.size()) throw ContractError("restricted_contacts: size mismatch");
  const ScaleStack& st = *sample.stack;
  const int k = st.k();
  RestrictedContacts out;
  for (int x : region.sites(g)) {
    const double v = sample.phi[x] + sample.h_at(x) - u;
    if (v < -1.0 || v > 1.0) continue;
    ++out.L;
    double run = 0.0;
    bool below = true;
    for (int i = 1; i <= k && below; ++i) {
      run += st.xi[i - 1][x];
      below = run <= u * i / k + offset;
    }
    if (below) ++out.L_prime;
  }
  return out;
}

}  // namespace gffpin
