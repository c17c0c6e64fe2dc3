#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gffpin/common.hpp"
#include "gffpin/lattice.hpp"

namespace gffpin {

// ---- Heat kernels -------------------------------------------------------

// 1D kernel of the rate-2 walk: p_t(n) = exp(-2t) I_|n|(2t).
double heat_kernel_1d(int n, double t);
// p_t(n) for n = 0..nmax.
std::vector<double> heat_kernel_1d_table(double t, int nmax);

// P_t(x,y) = p_t(x1-y1) p_t(x2-y2) for the walk generated by the lattice
// Laplacian (total jump rate 4).
double heat_kernel_free(Site x, Site y, double t);

// Sine eigenbasis of the 1D Dirichlet Laplacian on {0..N}.
class SpectralBasis {
 public:
  explicit SpectralBasis(int N);
  int N() const { return N_; }
  int modes() const { return N_ - 1; }
  // lambda_i = 2 (1 - cos(i pi / N)), i = 1..N-1.
  double lambda(int i) const { return lambda_[i - 1]; }
  const std::vector<double>& lambdas() const { return lambda_; }
  // Orthonormal matrix S(u-1, i-1) = sqrt(2/N) sin(i pi u / N).
  const Eigen::MatrixXd& S() const { return S_; }
  // sqrt(2/N) sin(i pi u / N), zero for u in {0, N}.
  double mode(int i, int u) const {
    return (u <= 0 || u >= N_) ? 0.0 : S_(u - 1, i - 1);
  }

 private:
  int N_;
  std::vector<double> lambda_;
  Eigen::MatrixXd S_;
};

double heat_kernel_dirichlet_1d(const SpectralBasis& b, int u, int v, double t);
double heat_kernel_dirichlet(const BoxGeometry& g, Site x, Site y, double t);
double heat_kernel_dirichlet(const SpectralBasis& b, Site x, Site y, double t);

// ---- Green functions ----------------------------------------------------

// G^m(0,x) from the lattice Fourier integral, reduced to one dimension by
// integrating the second angle in closed form.
double green_massive_infinite(Site offset, double m);
// Same quantity from int_0^inf exp(-m^2 t) P_t(0,x) dt.
double green_massive_infinite_time(Site offset, double m);
// Table T(a,b) = G^m(0,(a,b)) for 0 <= a,b <= R by time integration.
Eigen::MatrixXd green_massive_offset_table(int R, double m);

enum class GreenKind { FreeMassive, Dirichlet, Slice };

struct GreenTable {
  int N = 0;
  double m = 0.0;
  GreenKind kind = GreenKind::Dirichlet;
  std::vector<int> sites;
  Eigen::MatrixXd values;
  double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
};

// Spectral formula sum_{ij} phi_ij(x) phi_ij(y) / (lambda_i + lambda_j + m^2).
GreenTable green_dirichlet(const BoxGeometry& g, double m,
                           const std::vector<int>& sites);
// Direct sparse solve of (m^2 - Delta) G = delta with Dirichlet rows.
GreenTable green_dirichlet_solve(const BoxGeometry& g, double m,
                                 const std::vector<int>& sites);
// Single diagonal entry G^{m,*}(x,x), O(N^2).
double green_dirichlet_diag(const SpectralBasis& b, double m, Site x);
// Single entry G^{m,*}(x,y), O(N^2).
double green_dirichlet_entry(const SpectralBasis& b, double m, Site x, Site y);
// Free massive Green function over a site set, from an offset table.
GreenTable green_massive_table(const BoxGeometry& g, double m,
                               const std::vector<int>& sites);

// (m^2 - Delta) applied to column c of a full interior table, compared with
// the unit mass; returns max residual. Only meaningful when table.sites
// contains every interior site.
double dirichlet_column_residual(const BoxGeometry& g, const GreenTable& table,
                                 std::size_t column);

// a(x) = int_0^inf (P_t(0,0) - P_t(x,0)) dt.
double potential_kernel(Site x);

// f(m) = 1/2 int_{[0,1]^2} log(1 + m^2 / (4 (sin^2(pi x/2) + sin^2(pi y/2)))).
// Adaptive route: the y-integral is done in closed form.
double f_of_m(double m);
// Tensor Gauss-Legendre on a mesh graded towards the origin.
double f_of_m_tensor(double m);

// ---- Scale decomposition ------------------------------------------------

// int_t^inf exp(-m^2 s) P_s(0,0) ds.
double green_tail(double m, double t);

// k = floor(G^m(0,0) / unit).
int scale_count(double m, double unit = 1.0);
// Slice variance giving exactly k scales at mass m.
double unit_for_scale_count(double m, int k);

struct ScaleTimeGrid {
  double m = 0.0;
  double unit = 1.0;
  int k = 0;
  double g00 = 0.0;        // G^m(0,0)
  std::vector<double> t;   // t[0] = inf > t[1] > ... > t[k] = 0
  // int_{t_i}^{t_{i-1}} exp(-m^2 s) P_s(0,0) ds for i = 1..k.
  double slice_integral(int i) const;
};

// Times defined by unit-variance slices of the infinite-volume kernel.
// Throws DomainError when k < min_k.
ScaleTimeGrid scale_time_grid(double m, double unit = 1.0, int min_k = 3);

// int_{a}^{b} exp(-mu t) dt with b possibly infinite.
double slice_weight(double mu, double a, double b);

GreenTable covariance_slice(const BoxGeometry& g, const ScaleTimeGrid& grid,
                            int i, const std::vector<int>& sites);
// Split of G^{m,*} at time tstar: first = long times (t > tstar),
// second = short times (t <= tstar).
std::pair<GreenTable, GreenTable> covariance_split(const BoxGeometry& g,
                                                   double m, double tstar,
                                                   const std::vector<int>& sites);

}  // namespace gffpin
