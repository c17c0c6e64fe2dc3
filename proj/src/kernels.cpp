#include "gffpin/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "gffpin/numerics.hpp"

namespace gffpin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double t_max_for(double m) { return 50.0 / (m * m); }

void require_time(double t) {
  if (!(t > 0.0)) throw DomainError("heat kernel: t must be > 0");
}

// sum_nodes w exp(-m^2 t) f(p_t) over [a,b]; f gets the 1D table up to nmax.
template <class F>
void time_sweep(double m, double a, double b, int nmax, F&& f) {
  const TimeNodes tn = time_nodes(a, b);
  std::vector<double> p(static_cast<std::size_t>(nmax) + 1);
  for (std::size_t q = 0; q < tn.t.size(); ++q) {
    const double t = tn.t[q];
    scaled_bessel_i(2.0 * t, nmax, p);
    f(tn.w[q] * std::exp(-m * m * t), p);
  }
}

}  // namespace

// ---- Heat kernels -------------------------------------------------------

double heat_kernel_1d(int n, double t) {
  require_time(t);
  n = std::abs(n);
  return scaled_bessel_i(2.0 * t, n)[n];
}

std::vector<double> heat_kernel_1d_table(double t, int nmax) {
  require_time(t);
  return scaled_bessel_i(2.0 * t, nmax);
}

double heat_kernel_free(Site x, Site y, double t) {
  require_time(t);
  const int a = std::abs(x.x1 - y.x1), b = std::abs(x.x2 - y.x2);
  const auto p = scaled_bessel_i(2.0 * t, std::max(a, b));
  return p[a] * p[b];
}

SpectralBasis::SpectralBasis(int N) : N_(N) {
  if (N < 2) throw InvalidGeometry("spectral basis needs N >= 2");
  const int M = N - 1;
  lambda_.resize(M);
  S_.resize(M, M);
  const double norm = std::sqrt(2.0 / N);
  for (int i = 1; i <= M; ++i) lambda_[i - 1] = 2.0 * (1.0 - std::cos(i * kPi / N));
  for (int u = 1; u <= M; ++u)
    for (int i = 1; i <= M; ++i)
      S_(u - 1, i - 1) = norm * std::sin(kPi * ((i * u) % (2 * N)) / N);
}

double heat_kernel_dirichlet_1d(const SpectralBasis& b, int u, int v, double t) {
  require_time(t);
  if (u <= 0 || v <= 0 || u >= b.N() || v >= b.N()) return 0.0;
  double s = 0.0;
  for (int i = 1; i <= b.modes(); ++i)
    s += std::exp(-b.lambda(i) * t) * b.mode(i, u) * b.mode(i, v);
  return std::max(s, 0.0);
}

double heat_kernel_dirichlet(const SpectralBasis& b, Site x, Site y, double t) {
  return heat_kernel_dirichlet_1d(b, x.x1, y.x1, t) *
         heat_kernel_dirichlet_1d(b, x.x2, y.x2, t);
}

double heat_kernel_dirichlet(const BoxGeometry& g, Site x, Site y, double t) {
  if (!g.contains(x.x1, x.x2) || !g.contains(y.x1, y.x2))
    throw IndexError("heat_kernel_dirichlet: site outside the box");
  return heat_kernel_dirichlet(SpectralBasis(g.N()), x, y, t);
}

// ---- Green functions ----------------------------------------------------

double green_massive_infinite(Site offset, double m) {
  if (!(m > 0.0)) throw DomainError("green_massive_infinite: m must be > 0");
  // Put the larger coordinate in the geometric factor r^n to avoid
  // oscillation in the remaining integral.
  int a = std::abs(offset.x1), n = std::abs(offset.x2);
  if (a > n) std::swap(a, n);
  const double m2 = m * m;
  auto f = [&](double th) {
    const double s = std::sin(0.5 * th);
    const double am2 = m2 + 4.0 * s * s;  // a - 2
    const double ap2 = am2 + 4.0;         // a + 2
    const double root = std::sqrt(am2 * ap2);
    const double r = 2.0 / (am2 + 2.0 + root);
    const double rn = n == 0 ? 1.0 : std::exp(n * std::log(r));
    return std::cos(a * th) * rn / root / kPi;
  };
  std::vector<double> cuts = {0.0};
  for (double c = m / 4.0; c < kPi; c *= 4.0) cuts.push_back(c);
  cuts.push_back(kPi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate_adaptive(f, cuts[i], cuts[i + 1], 1e-12);
  return total;
}

double green_massive_infinite_time(Site offset, double m) {
  if (!(m > 0.0)) throw DomainError("green_massive_infinite_time: m must be > 0");
  const int a = std::abs(offset.x1), b = std::abs(offset.x2);
  const double T = t_max_for(m);
  double s = 0.0;
  time_sweep(m, 0.0, T, std::max(a, b),
             [&](double w, const std::vector<double>& p) { s += w * p[a] * p[b]; });
  return s + expint_e1(m * m * T) / (4.0 * kPi);
}

Eigen::MatrixXd green_massive_offset_table(int R, double m) {
  if (!(m > 0.0)) throw DomainError("green_massive_offset_table: m must be > 0");
  const double T = t_max_for(m);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(R + 1, R + 1);
  time_sweep(m, 0.0, T, R, [&](double w, const std::vector<double>& p) {
    const Eigen::Map<const Eigen::VectorXd> v(p.data(), R + 1);
    out.noalias() += w * v * v.transpose();
  });
  out.array() += expint_e1(m * m * T) / (4.0 * kPi);
  return out;
}

namespace {

// Rows: sites, columns: modes scaled by sqrt(weight(mu)).
template <class W>
Eigen::MatrixXd mode_matrix(const BoxGeometry& g, const SpectralBasis& b,
                            const std::vector<int>& sites, W&& weight) {
  const int M = b.modes();
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sites.size()),
                                            static_cast<Eigen::Index>(M) * M);
  std::vector<double> sw(static_cast<std::size_t>(M) * M);
  for (int i = 1; i <= M; ++i)
    for (int j = 1; j <= M; ++j)
      sw[(i - 1) * M + (j - 1)] = std::sqrt(weight(b.lambda(i) + b.lambda(j)));
  for (std::size_t r = 0; r < sites.size(); ++r) {
    const Site x = g.site(sites[r]);
    if (g.is_boundary(sites[r])) continue;
    for (int i = 1; i <= M; ++i) {
      const double si = b.mode(i, x.x1);
      for (int j = 1; j <= M; ++j)
        U(static_cast<Eigen::Index>(r), (i - 1) * M + (j - 1)) =
            si * b.mode(j, x.x2) * sw[(i - 1) * M + (j - 1)];
    }
  }
  return U;
}

GreenTable spectral_table(const BoxGeometry& g, double m, GreenKind kind,
                          const std::vector<int>& sites,
                          const std::function<double(double)>& weight) {
  const SpectralBasis b(g.N());
  const Eigen::MatrixXd U = mode_matrix(g, b, sites, weight);
  GreenTable t;
  t.N = g.N();
  t.m = m;
  t.kind = kind;
  t.sites = sites;
  t.values = U * U.transpose();
  return t;
}

}  // namespace

GreenTable green_dirichlet(const BoxGeometry& g, double m,
                           const std::vector<int>& sites) {
  if (m < 0.0) throw DomainError("green_dirichlet: m must be >= 0");
  const double m2 = m * m;
  return spectral_table(g, m, GreenKind::Dirichlet, sites,
                        [m2](double mu) { return 1.0 / (mu + m2); });
}

GreenTable green_dirichlet_solve(const BoxGeometry& g, double m,
                                 const std::vector<int>& sites) {
  if (m < 0.0) throw DomainError("green_dirichlet_solve: m must be >= 0");
  const auto& interior = g.interior_sites();
  const int n = static_cast<int>(interior.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  for (int r = 0; r < n; ++r) {
    const int idx = interior[r];
    trip.emplace_back(r, r, 4.0 + m * m);
    for (int nb : g.neighbors(idx)) {
      if (nb >= 0 && g.is_interior(nb)) trip.emplace_back(r, g.interior_slot(nb), -1.0);
    }
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) throw NumericError("green_dirichlet_solve: factorization failed");
  GreenTable t;
  t.N = g.N();
  t.m = m;
  t.kind = GreenKind::Dirichlet;
  t.sites = sites;
  const auto ns = static_cast<Eigen::Index>(sites.size());
  t.values = Eigen::MatrixXd::Zero(ns, ns);
  for (Eigen::Index c = 0; c < ns; ++c) {
    if (g.is_boundary(sites[c])) continue;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(g.interior_slot(sites[c])) = 1.0;
    const Eigen::VectorXd col = solver.solve(rhs);
    for (Eigen::Index r = 0; r < ns; ++r)
      if (g.is_interior(sites[r])) t.values(r, c) = col(g.interior_slot(sites[r]));
  }
  return t;
}

double green_dirichlet_diag(const SpectralBasis& b, double m, Site x) {
  return green_dirichlet_entry(b, m, x, x);
}

double green_dirichlet_entry(const SpectralBasis& b, double m, Site x, Site y) {
  const int M = b.modes();
  const double m2 = m * m;
  double s = 0.0;
  for (int i = 1; i <= M; ++i) {
    const double a = b.mode(i, x.x1) * b.mode(i, y.x1);
    if (a == 0.0) continue;
    double inner = 0.0;
    for (int j = 1; j <= M; ++j)
      inner += b.mode(j, x.x2) * b.mode(j, y.x2) / (b.lambda(i) + b.lambda(j) + m2);
    s += a * inner;
  }
  return s;
}

GreenTable green_massive_table(const BoxGeometry& g, double m,
                               const std::vector<int>& sites) {
  const Eigen::MatrixXd off = green_massive_offset_table(g.N(), m);
  GreenTable t;
  t.N = g.N();
  t.m = m;
  t.kind = GreenKind::FreeMassive;
  t.sites = sites;
  const auto ns = static_cast<Eigen::Index>(sites.size());
  t.values.resize(ns, ns);
  for (Eigen::Index i = 0; i < ns; ++i) {
    const Site x = g.site(sites[i]);
    for (Eigen::Index j = 0; j < ns; ++j) {
      const Site y = g.site(sites[j]);
      t.values(i, j) = off(std::abs(x.x1 - y.x1), std::abs(x.x2 - y.x2));
    }
  }
  return t;
}

double dirichlet_column_residual(const BoxGeometry& g, const GreenTable& table,
                                 std::size_t column) {
  std::vector<int> row_of(g.size(), -1);
  for (std::size_t r = 0; r < table.sites.size(); ++r) row_of[table.sites[r]] = static_cast<int>(r);
  const int src = table.sites[column];
  double worst = 0.0;
  for (int idx : g.interior_sites()) {
    const int r = row_of[idx];
    if (r < 0) throw ContractError("residual check needs every interior site in the table");
    double v = (4.0 + table.m * table.m) * table.values(r, static_cast<Eigen::Index>(column));
    for (int nb : g.neighbors(idx)) {
      if (nb < 0 || g.is_boundary(nb)) continue;
      v -= table.values(row_of[nb], static_cast<Eigen::Index>(column));
    }
    if (idx == src) v -= 1.0;
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

double potential_kernel(Site x) {
  const int a = std::abs(x.x1), b = std::abs(x.x2);
  if (a == 0 && b == 0) return 0.0;
  const double r2 = static_cast<double>(a) * a + static_cast<double>(b) * b;
  const double T = 1e6 * std::max(1.0, r2);
  double s = 0.0;
  time_sweep(0.0, 0.0, T, std::max(a, b), [&](double w, const std::vector<double>& p) {
    s += w * (p[0] * p[0] - p[a] * p[b]);
  });
  // P_t(0,0) - P_t(x,0) = |x|^2 / (16 pi t^2) + O(t^-3)
  return s + r2 / (16.0 * kPi * T);
}

double f_of_m(double m) {
  if (!(m > 0.0) || m > 1.0) throw DomainError("f_of_m: m must be in (0,1]");
  const double q = 0.25 * m * m;
  // asinh(b) - asinh(a) with b^2 - a^2 = m^2/4, written without cancellation.
  auto f = [q](double x) {
    const double a = std::sin(0.5 * kPi * x);
    const double b = std::sqrt(a * a + q);
    return std::asinh(q / (b * std::sqrt(1.0 + a * a) + a * std::sqrt(1.0 + b * b)));
  };
  std::vector<double> cuts = {0.0};
  for (double c = m / 16.0; c < 1.0; c *= 4.0) cuts.push_back(c);
  cuts.push_back(1.0);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate_adaptive(f, cuts[i], cuts[i + 1], 1e-12);
  return total;
}

double f_of_m_tensor(double m) {
  if (!(m > 0.0) || m > 1.0) throw DomainError("f_of_m_tensor: m must be in (0,1]");
  // Panels [0,e], [e,2e], ..., [1/2,1] with e = 2^-40.
  std::vector<double> edges = {0.0};
  for (int p = 40; p >= 1; --p) edges.push_back(std::ldexp(1.0, -p));
  edges.push_back(1.0);
  const auto& xs = gl20_nodes();
  const auto& ws = gl20_weights();
  std::vector<double> nx, nw, s2;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double c = 0.5 * (edges[p] + edges[p + 1]), h = 0.5 * (edges[p + 1] - edges[p]);
    for (std::size_t q = 0; q < xs.size(); ++q) {
      nx.push_back(c + h * xs[q]);
      nw.push_back(h * ws[q]);
      const double s = std::sin(0.5 * kPi * nx.back());
      s2.push_back(s * s);
    }
  }
  const double c = 0.25 * m * m;
  double total = 0.0;
  for (std::size_t i = 0; i < nx.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < nx.size(); ++j) row += nw[j] * std::log1p(c / (s2[i] + s2[j]));
    total += nw[i] * row;
  }
  return 0.5 * total;
}

// ---- Scale decomposition ------------------------------------------------

double green_tail(double m, double t) {
  if (!(m > 0.0)) throw DomainError("green_tail: m must be > 0");
  const double T = std::max(t_max_for(m), t);
  double s = 0.0;
  time_sweep(m, t, T, 0, [&](double w, const std::vector<double>& p) { s += w * p[0] * p[0]; });
  return s + expint_e1(m * m * T) / (4.0 * kPi);
}

int scale_count(double m, double unit) {
  return static_cast<int>(std::floor(green_tail(m, 0.0) / unit));
}

double unit_for_scale_count(double m, int k) {
  if (k < 1) throw DomainError("unit_for_scale_count: k must be >= 1");
  return green_tail(m, 0.0) / (k + 0.5);
}

double ScaleTimeGrid::slice_integral(int i) const {
  if (i < 1 || i > k) throw IndexError("slice index out of range");
  const double lo = green_tail(m, t[i]);
  const double hi = i == 1 ? 0.0 : green_tail(m, t[i - 1]);
  return lo - hi;
}

ScaleTimeGrid scale_time_grid(double m, double unit, int min_k) {
  if (!(m > 0.0)) throw DomainError("scale_time_grid: m must be > 0");
  if (!(unit > 0.0)) throw DomainError("scale_time_grid: unit must be > 0");
  ScaleTimeGrid g;
  g.m = m;
  g.unit = unit;
  g.g00 = green_tail(m, 0.0);
  g.k = static_cast<int>(std::floor(g.g00 / unit));
  if (g.k < min_k)
    throw DomainError("scale_time_grid: mass too large, k=" + std::to_string(g.k) +
                      " < " + std::to_string(min_k));
  g.t.assign(static_cast<std::size_t>(g.k) + 1, 0.0);
  g.t[0] = kInf;
  for (int i = 1; i <= g.k - 1; ++i) {
    const double target = i * unit;
    // green_tail is decreasing in t; bisect in log t.
    double lo = -30.0, hi = std::log(t_max_for(m)) + 5.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (green_tail(m, std::exp(mid)) > target) lo = mid;
      else hi = mid;
    }
    g.t[i] = std::exp(0.5 * (lo + hi));
  }
  g.t[g.k] = 0.0;
  return g;
}

double slice_weight(double mu, double a, double b) {
  if (std::isinf(b)) return std::exp(-mu * a) / mu;
  return std::exp(-mu * a) * (-std::expm1(-mu * (b - a))) / mu;
}

GreenTable covariance_slice(const BoxGeometry& g, const ScaleTimeGrid& grid,
                            int i, const std::vector<int>& sites) {
  if (i < 1 || i > grid.k) throw IndexError("covariance_slice: i must be in 1..k");
  const double m2 = grid.m * grid.m;
  const double a = grid.t[i], b = grid.t[i - 1];
  return spectral_table(g, grid.m, GreenKind::Slice, sites,
                        [=](double mu) { return slice_weight(mu + m2, a, b); });
}

std::pair<GreenTable, GreenTable> covariance_split(const BoxGeometry& g, double m,
                                                   double tstar,
                                                   const std::vector<int>& sites) {
  const double m2 = m * m;
  GreenTable longt = spectral_table(g, m, GreenKind::Slice, sites, [=](double mu) {
    return slice_weight(mu + m2, tstar, kInf);
  });
  GreenTable shortt = spectral_table(g, m, GreenKind::Slice, sites, [=](double mu) {
    return slice_weight(mu + m2, 0.0, tstar);
  });
  return {std::move(longt), std::move(shortt)};
}

}  // namespace gffpin
