#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gffpin/disorder.hpp"
#include "gffpin/fields.hpp"
#include "gffpin/lattice.hpp"
#include "gffpin/rng.hpp"
#include "gffpin/stats.hpp"

namespace gffpin {

enum class ModelKind { Pinning, Copolymer };

// Sites carrying the interaction: {1..N}^2, the interior, the whole box, or
// the inner box with a configurable exponent.
enum class InteractionDomain { Tilde, Interior, Full, InnerPrime };

ModelKind parse_model_kind(const std::string& s);
InteractionDomain parse_domain(const std::string& s);
std::string to_string(InteractionDomain d);

struct PinningParams {
  ModelKind model = ModelKind::Pinning;
  double beta = 0.0;
  double h = 0.0;
  double m = 0.0;
  double u = 0.0;
  double rho = 0.0;  // copolymer coupling
  InteractionDomain domain = InteractionDomain::Tilde;
  double inner_exponent = 1.0;  // for InnerPrime
  BoundaryCondition bc;
};

std::vector<int> interaction_sites(const BoxGeometry& g, InteractionDomain d,
                                   double inner_exponent = 1.0);

// Per-site energy weight s_x (zero off the interaction domain):
// pinning beta omega_x - lambda(beta) + h; copolymer -2 rho (omega_x + h).
std::vector<double> site_weights(const BoxGeometry& g, const PinningParams& p,
                                 const DisorderField& omega);

// The interaction region: [u-1, u+1] for pinning, (-inf, 0) for copolymer.
struct Region {
  double lo = 0.0, hi = 0.0;
  bool hi_open = false;
  bool contains(double x) const { return x >= lo && (hi_open ? x < hi : x <= hi); }
};
Region interaction_region(const PinningParams& p);

// delta^u_x = 1[phi_x in [u-1,u+1]] at every site.
std::vector<char> contact_indicator(const std::vector<double>& phi, double u);
// Delta_x = 1[phi_x < 0], sign(0) = +1.
std::vector<char> negative_indicator(const std::vector<double>& phi);

// Full field with the boundary values of bc and zero interior.
std::vector<double> initial_field(const BoxGeometry& g, const BoundaryCondition& bc);

// Interaction energy sum_x s_x 1[phi_x in region] over the domain.
double energy(const BoxGeometry& g, const std::vector<double>& phi,
              const PinningParams& p, const DisorderField& omega);

struct ChainObservation {
  std::int64_t sweep = 0;
  double contacts = 0.0;          // sum over the domain of 1[phi in region]
  double contact_fraction = 0.0;  // contacts / |domain|
  double omega_contacts = 0.0;    // sum over the domain of omega_x 1[phi in region]
  double energy = 0.0;
};

// Heat-bath Markov chain for the pinning or copolymer Gibbs measure. The
// field includes its boundary values, which never change.
// The geometry and the disorder field are held by reference and must outlive
// the chain.
class GibbsChain {
 public:
  GibbsChain(const BoxGeometry& g, const PinningParams& p, const DisorderField& omega,
             Rng rng);

  void sweep();
  // Update coupling constants in place (field kept: warm start).
  void set_params(const PinningParams& p);
  void set_field(std::vector<double> phi);

  const std::vector<double>& field() const { return phi_; }
  const PinningParams& params() const { return p_; }
  std::int64_t sweeps() const { return sweeps_; }
  double energy() const { return energy_; }
  // Full recomputation of the energy; throws ContractError when the tracked
  // value drifted by more than tol.
  void check_energy(double tol = 1e-8);
  ChainObservation observe() const;
  const std::vector<int>& domain() const { return domain_; }
  const DisorderSpec& disorder_spec() const { return omega_.spec; }

 private:
  void update_site(int x);

  const BoxGeometry& g_;
  PinningParams p_;
  const DisorderField& omega_;
  Rng rng_;
  std::vector<double> phi_;
  std::vector<double> s_;
  std::vector<int> domain_;
  Region region_{};
  double prec_;   // 4 + m^2
  double sigma_;  // 1/sqrt(4+m^2)
  double energy_ = 0.0;
  std::int64_t sweeps_ = 0;
};

struct ChainSchedule {
  std::int64_t sweeps = 1000;
  std::int64_t burn_in = 100;
  std::int64_t thin = 1;
};

struct ChainResult {
  std::vector<ChainObservation> stream;
  Estimate contact_fraction;
  Estimate contacts;
  double tau = 0.5;  // integrated autocorrelation time of the contact count
  std::vector<double> final_field;
};

ChainResult run_chain(const BoxGeometry& g, const PinningParams& p,
                      const DisorderField& omega, const ChainSchedule& sched,
                      std::uint64_t seed, std::uint64_t replica = 0);

// log Z by adaptive quadrature over the Gaussian law of the interior values;
// at most two interior sites.
double exact_partition_small(const BoxGeometry& g, const PinningParams& p,
                             const DisorderField& omega);

// log E[prod_j w_j(phi_j)] for phi ~ N(mean, cov) in dimension 1 or 2 with
// w_j = exp(s_j) on the region and 1 elsewhere.
double gaussian_weighted_log_mass(const std::vector<double>& mean,
                                  const std::vector<std::vector<double>>& cov,
                                  const std::vector<double>& s, const Region& region);

struct RestrictedContacts {
  std::int64_t L = 0;        // contacts in the region
  std::int64_t L_prime = 0;  // contacts whose scale trajectory stays below the line
};

// delta'_x = 1[phi_x + H(x) - u in [-1,1]] 1[phi_i(x) <= u i / k + offset for all i],
// counted over the sites of `region`.
RestrictedContacts restricted_contacts(const BoxGeometry& g, const FieldSample& sample,
                                       double u, const SubBox& region, double offset = 10.0);

}  // namespace gffpin
