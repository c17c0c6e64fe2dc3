#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gffpin/lattice.hpp"

namespace gffpin {

enum class DisorderKind { Gaussian, Bernoulli, Tabulated };

struct DisorderSpec {
  DisorderKind kind = DisorderKind::Gaussian;
  // Tabulated law: support points and probabilities (normalised on build).
  std::vector<double> values;
  std::vector<double> probs;
  // Largest tilt with lambda(2 beta) finite; the domain of lambda is
  // [-2 beta_bar, 2 beta_bar].
  double beta_bar = std::numeric_limits<double>::infinity();

  static DisorderSpec gaussian();
  static DisorderSpec bernoulli();
  // Requires a centred law with positive variance.
  static DisorderSpec tabulated(std::vector<double> values, std::vector<double> probs);

  std::string name() const;
  double mean() const;
  double variance() const;
};

DisorderKind parse_disorder_kind(const std::string& s);

// lambda(beta) = log E[exp(beta omega)] and its first two derivatives.
double log_mgf(const DisorderSpec& spec, double beta);
double log_mgf_d1(const DisorderSpec& spec, double beta);
double log_mgf_d2(const DisorderSpec& spec, double beta);
// chi(beta) = lambda(2 beta) - 2 lambda(beta).
double chi(const DisorderSpec& spec, double beta);

struct DisorderField {
  int N = 0;
  std::uint64_t seed = 0;
  DisorderSpec spec;
  // One value per site index; only sites of {1..N}^2 carry disorder, the
  // rest are zero.
  std::vector<double> omega;
  double operator[](int idx) const { return omega[idx]; }
};

// omega_x is drawn from its own counter stream keyed by (seed, site), so the
// value at a site does not depend on N or on the visiting order.
DisorderField sample_disorder(const BoxGeometry& g, const DisorderSpec& spec,
                              std::uint64_t seed);

// Constant field on {1..N}^2.
DisorderField constant_disorder(const BoxGeometry& g, double value);

// Resample omega_x from the law tilted by exp(beta omega - lambda(beta)) at
// sites with contacts[x] != 0; other sites are copied.
DisorderField tilted_resample(const BoxGeometry& g, const DisorderField& omega,
                              const std::vector<char>& contacts, double beta,
                              std::uint64_t seed);

struct CellEventParams {
  int radius = 0;
  double threshold = 0.0;
};

// radius floor((log N1)^2), threshold lambda'(beta) (log N1)^3 / 2.
CellEventParams default_E_params(const DisorderSpec& spec, double beta, int N1);
// radius floor((log N1)^2), threshold (log N1)^3.
CellEventParams default_C_params(int N1);

// Number of sites in the largest l1 ball of radius r intersected with the cell.
std::int64_t max_window_size(const SubBox& cell, int radius);

// max over x in the cell of sum_{z in cell, |z-x|_1 <= r} values[z].
double max_window_sum(const BoxGeometry& g, const std::vector<double>& values,
                      const SubBox& cell, int radius);

struct CellEvent {
  bool value = false;
  // The threshold exceeds the largest possible window count, so the event
  // cannot occur at this cell size.
  bool structurally_false = false;
  double max_sum = 0.0;
};

CellEvent event_E_cell(const BoxGeometry& g, const DisorderField& omega,
                       const SubBox& cell, const CellEventParams& p);
CellEvent event_C_cell(const BoxGeometry& g, const std::vector<char>& contacts,
                       const SubBox& cell, const CellEventParams& p);

struct Penalty {
  double value = 1.0;  // exp(-2 * triggered)
  int triggered = 0;
  std::vector<char> per_cell;
};

Penalty penalty_f(const BoxGeometry& g, const DisorderField& omega,
                  const CellTiling& tiling, const CellEventParams& p);

}  // namespace gffpin
