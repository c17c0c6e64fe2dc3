#include "gffpin/fields.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "gffpin/common.hpp"
#include "gffpin/parallel.hpp"

namespace gffpin {

// ---- Boundary conditions ------------------------------------------------

BoundaryCondition BoundaryCondition::zero() { return {}; }

BoundaryCondition BoundaryCondition::constant_value(double c) {
  BoundaryCondition bc;
  bc.kind = Kind::Constant;
  bc.constant = c;
  return bc;
}

BoundaryCondition BoundaryCondition::explicit_values(std::vector<double> v) {
  BoundaryCondition bc;
  bc.kind = Kind::Explicit;
  bc.values = std::move(v);
  return bc;
}

void BoundaryCondition::validate(const BoxGeometry& g) const {
  if (kind == Kind::Explicit || kind == Kind::SampledMassive) {
    if (values.size() != g.boundary_sites().size())
      throw ContractError("boundary condition: expected one value per boundary site");
  }
  for (double v : values)
    if (!std::isfinite(v)) throw ContractError("boundary condition: non-finite value");
  if (!std::isfinite(constant)) throw ContractError("boundary condition: non-finite constant");
}

double BoundaryCondition::value(int slot) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Constant: return constant;
    default: return values[static_cast<std::size_t>(slot)];
  }
}

double BoundaryCondition::max_abs() const {
  if (kind == Kind::Zero) return 0.0;
  if (kind == Kind::Constant) return std::abs(constant);
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

// ---- Scale stack ----------------------------------------------------------

std::vector<double> ScaleStack::partial(int i) const {
  if (i < 0 || i > k()) throw IndexError("ScaleStack::partial: i must be in 0..k");
  std::vector<double> out(xi.empty() ? 0 : xi[0].size(), 0.0);
  for (int s = 0; s < i; ++s)
    for (std::size_t x = 0; x < out.size(); ++x) out[x] += xi[s][x];
  return out;
}

std::vector<std::vector<double>> ScaleStack::partials() const {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(k()) + 1);
  out[0].assign(xi.empty() ? 0 : xi[0].size(), 0.0);
  for (int i = 1; i <= k(); ++i) {
    out[i] = out[i - 1];
    for (std::size_t x = 0; x < out[i].size(); ++x) out[i][x] += xi[i - 1][x];
  }
  return out;
}

// ---- Dirichlet sampler ----------------------------------------------------

void sine_synthesis(const SpectralBasis& b, const Eigen::MatrixXd& coeff,
                    std::vector<double>& phi) {
  const int N = b.N();
  const Eigen::MatrixXd X = b.S() * coeff * b.S().transpose();
  phi.assign(static_cast<std::size_t>(N + 1) * (N + 1), 0.0);
  // coeff(i-1, j-1) multiplies mode i in x1 and mode j in x2; X(u-1, v-1)
  // is the value at (u, v).
  for (int v = 1; v < N; ++v)
    for (int u = 1; u < N; ++u) phi[v * (N + 1) + u] = X(u - 1, v - 1);
}

namespace {

Eigen::MatrixXd mode_sd(const SpectralBasis& b, double m2,
                        const std::function<double(double)>& var) {
  const int M = b.modes();
  Eigen::MatrixXd sd(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j)
      sd(i, j) = std::sqrt(var(b.lambdas()[i] + b.lambdas()[j] + m2));
  return sd;
}

Eigen::MatrixXd gaussian_matrix(int M, Rng& rng) {
  Eigen::MatrixXd Z(M, M);
  for (int j = 0; j < M; ++j)
    for (int i = 0; i < M; ++i) Z(i, j) = rng.normal();
  return Z;
}

}  // namespace

DirichletSampler::DirichletSampler(const BoxGeometry& g, double m)
    : N_(g.N()), m_(m), basis_(g.N()) {
  if (!(m >= 0.0) || !std::isfinite(m)) throw DomainError("DirichletSampler: m must be >= 0");
  sd_ = mode_sd(basis_, m * m, [](double mu) { return 1.0 / mu; });
}

void DirichletSampler::sample_into(Rng& rng, std::vector<double>& phi) const {
  const Eigen::MatrixXd Z = gaussian_matrix(basis_.modes(), rng);
  sine_synthesis(basis_, sd_.cwiseProduct(Z), phi);
}

FieldSample DirichletSampler::sample(Rng& rng) const {
  FieldSample s;
  s.N = N_;
  s.m = m_;
  s.seed = rng.key();
  sample_into(rng, s.phi);
  return s;
}

FieldSample sample_dirichlet_field(const BoxGeometry& g, double m, std::uint64_t seed) {
  DirichletSampler sampler(g, m);
  Rng rng(seed, "dirichlet-field");
  FieldSample s = sampler.sample(rng);
  s.seed = seed;
  return s;
}

// ---- Harmonic extension ---------------------------------------------------

struct HarmonicSolver::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

HarmonicSolver::HarmonicSolver(const BoxGeometry& g, double m)
    : g_(g), m_(m), impl_(new Impl) {
  if (!(m >= 0.0) || !std::isfinite(m)) throw DomainError("HarmonicSolver: m must be >= 0");
  const auto& interior = g.interior_sites();
  const int n = static_cast<int>(interior.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  for (int r = 0; r < n; ++r) {
    trip.emplace_back(r, r, 4.0 + m * m);
    for (int y : g.neighbors(interior[r])) {
      const int c = g.interior_slot(y);
      if (c >= 0) trip.emplace_back(r, c, -1.0);
    }
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  impl_->ldlt.compute(A);
  if (impl_->ldlt.info() != Eigen::Success) {
    delete impl_;
    throw NumericError("HarmonicSolver: factorisation failed");
  }
}

HarmonicSolver::~HarmonicSolver() { delete impl_; }

HarmonicExtension HarmonicSolver::solve(const BoundaryCondition& bc) const {
  bc.validate(g_);
  if (bc.kind == BoundaryCondition::Kind::SampledMassive && bc.values.empty())
    throw ContractError("harmonic extension: boundary data not materialised");
  const auto& interior = g_.interior_sites();
  const auto& boundary = g_.boundary_sites();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(interior.size()));
  for (std::size_t r = 0; r < interior.size(); ++r)
    for (int y : g_.neighbors(interior[r]))
      if (y >= 0 && g_.is_boundary(y)) rhs[static_cast<Eigen::Index>(r)] += bc.value(g_.boundary_slot(y));
  const Eigen::VectorXd h = impl_->ldlt.solve(rhs);
  HarmonicExtension out;
  out.m = m_;
  out.bc = bc;
  out.H.assign(g_.size(), 0.0);
  for (std::size_t s = 0; s < boundary.size(); ++s)
    out.H[boundary[s]] = bc.value(static_cast<int>(s));
  for (std::size_t r = 0; r < interior.size(); ++r)
    out.H[interior[r]] = h[static_cast<Eigen::Index>(r)];
  out.residual = harmonic_residual(g_, m_, out.H);
  return out;
}

HarmonicExtension harmonic_extension(const BoxGeometry& g, double m,
                                     const BoundaryCondition& bc) {
  HarmonicSolver solver(g, m);
  return solver.solve(bc);
}

double harmonic_residual(const BoxGeometry& g, double m, const std::vector<double>& H) {
  if (H.size() != g.size()) throw ContractError("harmonic_residual: size mismatch");
  double r = 0.0;
  for (int x : g.interior_sites()) {
    double s = (4.0 + m * m) * H[x];
    for (int y : g.neighbors(x)) s -= H[y];
    r = std::max(r, std::abs(s));
  }
  return r;
}

Estimate harmonic_extension_rw(const BoxGeometry& g, double m,
                               const BoundaryCondition& bc, Site x,
                               std::int64_t walks, Rng& rng) {
  bc.validate(g);
  if (!g.contains(x.x1, x.x2)) throw ContractError("harmonic_extension_rw: site outside box");
  if (walks < 2) throw ContractError("harmonic_extension_rw: need at least two walks");
  const int start = g.index(x);
  const double log_survive = std::log(4.0 / (4.0 + m * m));
  RunningStats st;
  for (std::int64_t w = 0; w < walks; ++w) {
    int cur = start;
    std::int64_t steps = 0;
    while (!g.is_boundary(cur)) {
      cur = g.neighbors(cur)[rng() & 3u];
      ++steps;
    }
    st.add(std::exp(log_survive * static_cast<double>(steps)) *
           bc.value(g.boundary_slot(cur)));
  }
  return {st.mean(), st.sem(), st.count()};
}

FieldSample shift_by_extension(const FieldSample& sample, const HarmonicExtension& H) {
  if (H.H.size() != sample.phi.size())
    throw ContractError("shift_by_extension: size mismatch");
  FieldSample out = sample;
  out.bc = H.bc;
  if (out.H.empty())
    out.H = H.H;
  else
    for (std::size_t i = 0; i < out.H.size(); ++i) out.H[i] += H.H[i];
  return out;
}

std::vector<double> FieldSample::full() const {
  std::vector<double> f = phi;
  for (std::size_t i = 0; i < H.size() && i < f.size(); ++i) f[i] += H[i];
  return f;
}

// ---- Boundary of the infinite-volume massive field ------------------------

InfiniteBoundarySampler::InfiniteBoundarySampler(const BoxGeometry& g, double m) : m_(m) {
  if (!(m > 0.0) || !std::isfinite(m))
    throw DomainError("infinite-volume boundary: m must be > 0");
  const auto& bs = g.boundary_sites();
  const int n = static_cast<int>(bs.size());
  const Eigen::MatrixXd table = green_massive_offset_table(g.N(), m);
  cov_.resize(n, n);
  for (int a = 0; a < n; ++a) {
    const Site sa = g.site(bs[a]);
    for (int b = 0; b <= a; ++b) {
      const Site sb = g.site(bs[b]);
      const double v = table(std::abs(sa.x1 - sb.x1), std::abs(sa.x2 - sb.x2));
      cov_(a, b) = v;
      cov_(b, a) = v;
    }
  }
  double jitter = 0.0;
  for (int attempt = 0; attempt < 12; ++attempt) {
    Eigen::MatrixXd c = cov_;
    if (jitter > 0.0) c.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() == Eigen::Success) {
      L_ = llt.matrixL();
      jitter_ = jitter;
      return;
    }
    jitter = jitter == 0.0 ? 1e-14 * cov_(0, 0) : jitter * 10.0;
  }
  throw NumericError("infinite-volume boundary: covariance not positive definite");
}

BoundaryCondition InfiniteBoundarySampler::sample(Rng& rng, std::uint64_t seed_tag) const {
  Eigen::VectorXd z(L_.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  const Eigen::VectorXd v = L_.triangularView<Eigen::Lower>() * z;
  BoundaryCondition bc;
  bc.kind = BoundaryCondition::Kind::SampledMassive;
  bc.m = m_;
  bc.seed = seed_tag;
  bc.values.assign(v.data(), v.data() + v.size());
  return bc;
}

BoundaryCondition sample_boundary_infinite_massive(const BoxGeometry& g, double m,
                                                   std::uint64_t seed) {
  InfiniteBoundarySampler sampler(g, m);
  Rng rng(seed, "infinite-boundary");
  return sampler.sample(rng, seed);
}

// ---- Scale stack sampler --------------------------------------------------

ScaleStackSampler::ScaleStackSampler(const BoxGeometry& g, ScaleTimeGrid grid)
    : N_(g.N()), grid_(std::move(grid)), basis_(g.N()) {
  const double m2 = grid_.m * grid_.m;
  for (int i = 1; i <= grid_.k; ++i) {
    const double a = grid_.t[i], b = grid_.t[i - 1];
    sd_.push_back(mode_sd(basis_, m2, [=](double mu) { return slice_weight(mu, a, b); }));
  }
}

FieldSample ScaleStackSampler::sample(Rng& rng, bool keep_stack) const {
  FieldSample s;
  s.N = N_;
  s.m = grid_.m;
  s.seed = rng.key();
  s.phi.assign(static_cast<std::size_t>(N_ + 1) * (N_ + 1), 0.0);
  ScaleStack stack;
  stack.grid = grid_;
  std::vector<double> xi;
  for (int i = 0; i < grid_.k; ++i) {
    const Eigen::MatrixXd Z = gaussian_matrix(basis_.modes(), rng);
    sine_synthesis(basis_, sd_[i].cwiseProduct(Z), xi);
    for (std::size_t x = 0; x < xi.size(); ++x) s.phi[x] += xi[x];
    if (keep_stack) stack.xi.push_back(xi);
  }
  if (keep_stack) s.stack = std::move(stack);
  return s;
}

FieldSample sample_scale_stack(const BoxGeometry& g, double m, std::uint64_t seed,
                               double unit) {
  ScaleStackSampler sampler(g, scale_time_grid(m, unit));
  Rng rng(seed, "scale-stack");
  FieldSample s = sampler.sample(rng);
  s.seed = seed;
  return s;
}

// ---- Gaussian bridge ------------------------------------------------------

std::vector<Estimate> bridge_positivity_probabilities(const std::vector<double>& variances,
                                                      const std::vector<double>& xs,
                                                      std::int64_t samples, std::uint64_t seed) {
  const int k = static_cast<int>(variances.size());
  if (k < 1) throw DomainError("bridge: need at least one increment");
  if (samples < 2) throw ContractError("bridge: need at least two samples");
  double V = 0.0;
  for (double v : variances) {
    if (!(v > 0.0) || v > 2.0) throw DomainError("bridge: increment variance must lie in (0, 2]");
    V += v;
  }
  if (V < 0.5 * k) throw DomainError("bridge: total variance below k/2");
  std::vector<double> Vcum(k), sd(k);
  double acc = 0.0;
  for (int i = 0; i < k; ++i) {
    acc += variances[i];
    Vcum[i] = acc;
    sd[i] = std::sqrt(variances[i]);
  }
  // Fixed-size blocks with their own streams; counts are merged by block index.
  constexpr std::int64_t kBlock = 1 << 16;
  const std::int64_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<std::vector<std::int64_t>> hits(blocks, std::vector<std::int64_t>(xs.size(), 0));
  parallel_for(blocks, [&](std::int64_t b) {
    Rng rng(seed, "bridge", static_cast<std::uint64_t>(b));
    std::vector<double> W(k);
    const std::int64_t n = std::min(kBlock, samples - b * kBlock);
    for (std::int64_t s = 0; s < n; ++s) {
      double w = 0.0;
      for (int i = 0; i < k; ++i) {
        w += sd[i] * rng.normal();
        W[i] = w;
      }
      const double Wk = W[k - 1];
      double mx = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < k; ++i) mx = std::max(mx, W[i] - (Vcum[i] / V) * Wk);
      for (std::size_t q = 0; q < xs.size(); ++q)
        if (mx <= xs[q]) ++hits[b][q];
    }
  });
  std::vector<Estimate> out;
  for (std::size_t q = 0; q < xs.size(); ++q) {
    std::int64_t c = 0;
    for (const auto& h : hits) c += h[q];
    const double p = static_cast<double>(c) / samples;
    out.push_back({p, std::sqrt(p * (1.0 - p) / (samples - 1)), samples});
  }
  return out;
}

Estimate bridge_positivity_probability(const std::vector<double>& variances, double x,
                                       std::int64_t samples, std::uint64_t seed) {
  return bridge_positivity_probabilities(variances, {x}, samples, seed)[0];
}

}  // namespace gffpin
