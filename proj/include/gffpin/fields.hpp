#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gffpin/kernels.hpp"
#include "gffpin/lattice.hpp"
#include "gffpin/rng.hpp"
#include "gffpin/stats.hpp"

namespace gffpin {

struct BoundaryCondition {
  enum class Kind { Zero, Constant, Explicit, SampledMassive };
  Kind kind = Kind::Zero;
  double constant = 0.0;
  // One value per boundary site, ordered as BoxGeometry::boundary_sites().
  std::vector<double> values;
  std::uint64_t seed = 0;  // SampledMassive only
  double m = 0.0;          // SampledMassive only

  static BoundaryCondition zero();
  static BoundaryCondition constant_value(double c);
  static BoundaryCondition explicit_values(std::vector<double> v);

  void validate(const BoxGeometry& g) const;
  double value(int slot) const;
  double max_abs() const;
};

// Independent fields xi_1..xi_k with covariances Q*_i; partial sums phi_i.
struct ScaleStack {
  ScaleTimeGrid grid;
  std::vector<std::vector<double>> xi;  // xi[i-1][site]
  int k() const { return grid.k; }
  std::vector<double> partial(int i) const;
  // All partial sums at once: out[i][site] = phi_i(site), i = 0..k.
  std::vector<std::vector<double>> partials() const;
};

struct FieldSample {
  int N = 0;
  double m = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> phi;  // per site, row-major
  BoundaryCondition bc;
  // Harmonic extension added to the zero-boundary field; empty means H = 0.
  std::vector<double> H;
  std::optional<ScaleStack> stack;

  double h_at(int idx) const { return H.empty() ? 0.0 : H[idx]; }
  // phi + H.
  std::vector<double> full() const;
};

// Writes S C S^T into the interior of a site-indexed field (boundary = 0).
void sine_synthesis(const SpectralBasis& b, const Eigen::MatrixXd& coeff,
                    std::vector<double>& phi);

// Exact sampler of the zero-boundary field with covariance G^{m,*}.
class DirichletSampler {
 public:
  DirichletSampler(const BoxGeometry& g, double m);
  void sample_into(Rng& rng, std::vector<double>& phi) const;
  FieldSample sample(Rng& rng) const;
  int N() const { return N_; }
  double m() const { return m_; }

 private:
  int N_;
  double m_;
  SpectralBasis basis_;
  Eigen::MatrixXd sd_;  // per-mode standard deviation
};

FieldSample sample_dirichlet_field(const BoxGeometry& g, double m,
                                   std::uint64_t seed);

struct HarmonicExtension {
  std::vector<double> H;  // per site; equals the boundary data on the boundary
  double m = 0.0;
  BoundaryCondition bc;
  double residual = 0.0;  // max |Delta H - m^2 H| over the interior
};

// Caches the sparse factorisation of (4 + m^2) I - A on the interior.
class HarmonicSolver {
 public:
  HarmonicSolver(const BoxGeometry& g, double m);
  ~HarmonicSolver();
  HarmonicSolver(const HarmonicSolver&) = delete;
  HarmonicSolver& operator=(const HarmonicSolver&) = delete;
  HarmonicExtension solve(const BoundaryCondition& bc) const;

 private:
  struct Impl;
  BoxGeometry g_;
  double m_;
  Impl* impl_;
};

HarmonicExtension harmonic_extension(const BoxGeometry& g, double m,
                                     const BoundaryCondition& bc);

// Random-walk estimate of E_x[exp(-m^2 tau) phihat(X_tau)]; each jump of the
// rate-4 walk survives the killing with probability 4/(4+m^2).
Estimate harmonic_extension_rw(const BoxGeometry& g, double m,
                               const BoundaryCondition& bc, Site x,
                               std::int64_t walks, Rng& rng);

// Max residual of (4+m^2)H(x) - sum_{y~x} H(y) over interior sites.
double harmonic_residual(const BoxGeometry& g, double m, const std::vector<double>& H);

// Adds H to the stored extension, so the full field becomes phi + H; phi and
// the scale stack keep describing the zero-boundary part.
FieldSample shift_by_extension(const FieldSample& sample, const HarmonicExtension& H);

// Joint Gaussian sampler of the boundary values of the infinite-volume
// massive field (dense Cholesky of the 4N x 4N covariance).
class InfiniteBoundarySampler {
 public:
  InfiniteBoundarySampler(const BoxGeometry& g, double m);
  BoundaryCondition sample(Rng& rng, std::uint64_t seed_tag = 0) const;
  double jitter() const { return jitter_; }
  const Eigen::MatrixXd& covariance() const { return cov_; }

 private:
  double m_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd L_;
  double jitter_ = 0.0;
};

BoundaryCondition sample_boundary_infinite_massive(const BoxGeometry& g, double m,
                                                   std::uint64_t seed);

class ScaleStackSampler {
 public:
  ScaleStackSampler(const BoxGeometry& g, ScaleTimeGrid grid);
  FieldSample sample(Rng& rng, bool keep_stack = true) const;
  const ScaleTimeGrid& grid() const { return grid_; }

 private:
  int N_;
  ScaleTimeGrid grid_;
  SpectralBasis basis_;
  std::vector<Eigen::MatrixXd> sd_;  // per slice, per mode
};

FieldSample sample_scale_stack(const BoxGeometry& g, double m, std::uint64_t seed,
                               double unit = 1.0);

// MC estimate of P[max_i X_i <= x | X_k = 0] for a walk with independent
// centred Gaussian increments of the given variances, via the exact bridge
// construction B_i = W_i - (V_i/V) W_k.
Estimate bridge_positivity_probability(const std::vector<double>& variances,
                                       double x, std::int64_t samples,
                                       std::uint64_t seed);
// Same bridges evaluated at several thresholds; monotone in x by construction.
std::vector<Estimate> bridge_positivity_probabilities(const std::vector<double>& variances,
                                                      const std::vector<double>& xs,
                                                      std::int64_t samples, std::uint64_t seed);

}  // namespace gffpin
