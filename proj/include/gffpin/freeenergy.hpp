#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gffpin/disorder.hpp"
#include "gffpin/fields.hpp"
#include "gffpin/lattice.hpp"
#include "gffpin/pinning.hpp"
#include "gffpin/stats.hpp"

namespace gffpin {

struct FreeEnergyEstimate {
  double value = 0.0;  // (1/N^2) log Z averaged over replicas
  double se = 0.0;
  double spread = 0.0;  // replica-to-replica standard deviation of value
  int N = 0;
  PinningParams params;
  std::string method;
  int replicas = 0;
  std::uint64_t seed = 0;
  double tau_max = 0.5;  // largest integrated autocorrelation time seen
};

// Thermodynamic-integration budget: Gauss-Legendre nodes per leg, and the
// chain schedule run at every node (chains warm-start from the previous node).
struct TIConfig {
  int nodes = 6;
  ChainSchedule sched{400, 100, 1};
};

struct LogZ {
  double value = 0.0;
  double se = 0.0;
  double tau_max = 0.5;
};

// log Z for one disorder realisation along the straight path s -> (s beta, s h),
// s in [0,1], with d/ds log Z = E_s[sum_x (beta (omega_x - lambda'(s beta)) + h) delta_x].
// The chain is left at the endpoint and can be reused by the caller.
LogZ log_partition_ti(GibbsChain& chain, const PinningParams& target, const TIConfig& cfg);

// Cumulative log Z increments along h at fixed beta, starting from
// params.h = hgrid[0]; panel j integrates [hgrid[j-1], hgrid[j]].
struct HLeg {
  std::vector<double> h;
  std::vector<double> cumulative;  // log Z(h_j) - log Z(h_0)
  std::vector<double> panel;       // per-panel increments
  std::vector<double> panel_se;
  double tau_max = 0.5;
};
HLeg h_leg_ti(GibbsChain& chain, const std::vector<double>& hgrid, const TIConfig& cfg);

// Pure model (beta = 0): (1/N^2) log Z_{N,h}. Equals the annealed free energy
// at the same (N, h).
FreeEnergyEstimate pure_free_energy_estimate(int N, double h, const TIConfig& cfg,
                                             std::uint64_t seed,
                                             InteractionDomain domain = InteractionDomain::Tilde);
FreeEnergyEstimate annealed_free_energy(int N, double h, const TIConfig& cfg,
                                        std::uint64_t seed);

FreeEnergyEstimate quenched_free_energy_estimate(const DisorderSpec& spec, double beta,
                                                 double h, int N, int replicas,
                                                 const TIConfig& cfg, std::uint64_t seed);

FreeEnergyEstimate massive_shifted_free_energy_estimate(const DisorderSpec& spec,
                                                        double beta, double h, double m,
                                                        double u, int N, int replicas,
                                                        const TIConfig& cfg,
                                                        std::uint64_t seed);

// (1/N^2) E log Z on an h-grid with one beta leg shared by all grid points.
// With replicas > 1 second differences are averaged per replica.
struct HGridResult {
  std::vector<double> h;
  std::vector<double> value, se;
  std::vector<double> second_diff, second_diff_se;  // index j -> grid points j-1, j, j+1
  std::vector<double> increment, increment_se;      // F(h_j) - F(h_{j-1})
  int replicas = 0;
  double tau_max = 0.5;
};
HGridResult free_energy_h_grid(const DisorderSpec& spec, double beta,
                               const std::vector<double>& hgrid, int N, int replicas,
                               const TIConfig& cfg, std::uint64_t seed);

// ---- Events -----------------------------------------------------------------

struct EventThresholds {
  double h = 0.1;          // A^h_N: |phi| <= |log h|^2
  double m = 0.0;
  double K = 0.0;          // D_N and D^0_N
  double u = 0.0;
  double alpha = 0.75;
  double gamma = 5.0132565492620005;  // 2 sqrt(2 pi)
  double A_offset = 0.0;   // additive threshold T in the A_N line
  double unit = 1.0;       // slice variance of the scale stack
  double inner_exponent = 1.0;         // Lambda'_N
  double inner_double_exponent = 2.0;  // Lambda''_N
  // E[frame contacts | A_N] for C'_N; NaN when unknown.
  double frame_reference = std::numeric_limits<double>::quiet_NaN();
  double f_m = std::numeric_limits<double>::quiet_NaN();  // f(m), computed when NaN
};

struct EventFlags {
  std::optional<bool> A_h, D0, D, A, C_prime, C, B;
  double max_abs = 0.0;
  double sum_sq_full = 0.0;   // over Lambda_N
  double sum_sq_tilde = 0.0;  // over {1..N}^2
  double L_N = 0.0;           // contacts in Lambda'_N
  double frame_contacts = 0.0;  // contacts in {1..N}^2 minus Lambda'_N
  double A_worst = 0.0;       // max over x, i of phi_i(x) - line
};

// The field is sample.phi + sample.H. A_N needs the scale stack; C'_N needs
// frame_reference; B_N needs C_N.
EventFlags event_flags(const BoxGeometry& g, const FieldSample& sample,
                       const EventThresholds& t);

// Sum over {1..N}^2 of phi^2 compared with N^2 (2 f(m)/m^2 - K).
bool event_D(const BoxGeometry& g, const std::vector<double>& full_field, double m,
             double K, double f_m);

// ---- Finite-volume criterion -------------------------------------------------

struct CriterionReport {
  int N = 0;
  double m = 0.0, u = 0.0, K = 0.0, beta = 0.0, h = 0.0;
  double estimate = 0.0;  // (1/N^2) mean log Z' over replicas
  double se = 0.0;
  double penalty = 0.0;   // K m^2
  double margin = 0.0;    // estimate - penalty
  bool positive = false;  // margin > 3 se
  double mean_log_pD = 0.0;  // mean log of the Gibbs probability of D_N
  int replicas = 0;
  int replicas_without_D = 0;  // D_N never observed; 1/(2n) used for P(D_N)
};

struct RestrictedLogZ {
  double log_z = 0.0;       // log Z' = log Z + log P_Gibbs(D_N)
  double log_z_se = 0.0;
  double log_pD = 0.0;
  double pD = 0.0;
  bool D_never_seen = false;
};

// One replica of log Z'_N: boundary from the infinite-volume massive field,
// disorder sampled, TI to (beta, h), then the Gibbs frequency of D_N.
RestrictedLogZ restricted_log_partition(const BoxGeometry& g, const DisorderSpec& spec,
                                        double beta, double h, double m, double u,
                                        double K, const TIConfig& cfg,
                                        std::uint64_t seed, std::uint64_t replica);

CriterionReport finite_volume_criterion(const DisorderSpec& spec, double beta, double h,
                                        double m, double u, double K, int N,
                                        int replicas, const TIConfig& cfg,
                                        std::uint64_t seed);

// ---- Schedules and closed forms -----------------------------------------------

struct ParameterSchedule {
  double h = 0.0;
  double alpha = 0.75;
  double gamma = 5.0132565492620005;
  double log_N = 0.0;   // log N_h = h^{-20}
  double log_m = 0.0;   // log m_h = -log N_h + (1/4) log log N_h
  double u = 0.0;       // u_h
  double log_lower = 0.0;  // log of exp(-h^{-20})
  double log_upper = 0.0;  // log of exp(-|log h|^{3/2})
};
ParameterSchedule parameter_schedule(double h);

// Desk-scale analogues in N: u(N) and m(N) = N^{-1} (log N)^{1/4}.
double desk_u(double N, double alpha = 0.75);
double desk_m(double N);

// hcheck_c(rho) = lambda(-2 rho) / (2 rho).
double copolymer_critical_point(const DisorderSpec& spec, double rho);

// ---- Conditioned contact statistics --------------------------------------------

struct ContactStatistics {
  Estimate L_given_B;       // E[L_N | B_N]
  Estimate L;               // E[L_N]
  Estimate L_prime;         // E[L'_N]
  Estimate L_prime_sq;      // E[(L'_N)^2]
  double second_moment_ratio = 0.0;  // E[L'^2] / E[L']^2
  double frame_reference = 0.0;      // E[frame contacts | A_N]
  double freq_A = 0.0, freq_B = 0.0;
  int k = 0;
  double unit = 1.0;
  std::vector<std::int64_t> j_histogram;  // pairwise j(x,y) counts over Lambda'_N pairs
  std::int64_t samples = 0;
};

struct ContactStatsConfig {
  int N = 64;
  double m = 0.0;       // 0 -> desk_m(N)
  double u = -1.0;      // < 0 -> desk_u(N)
  int k_target = 3;
  double K = 0.0;
  double inner_exponent = 1.0;
  double A_offset = -1.0;  // < 0 -> gamma log log N
  double alpha = 0.75;
  std::int64_t samples = 2000;
  std::int64_t pair_samples = 200000;
};

ContactStatistics conditioned_contact_statistics(const ContactStatsConfig& cfg,
                                                 std::uint64_t seed);

}  // namespace gffpin
