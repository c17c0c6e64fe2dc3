#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gffpin/rng.hpp"

namespace gffpin {

double normal_cdf(double z);
// Upper tail 1 - Phi(z), accurate for large z.
double normal_sf(double z);
double normal_quantile(double p);
// Inverse of the upper tail.
double normal_isf(double q);
// Phi(b) - Phi(a), accurate in both tails.
double normal_mass(double a, double b);

// Standard normal conditioned on [a,b]; either end may be infinite.
double sample_truncated_normal(double a, double b, Rng& rng);

// out[n] = exp(-x) I_n(x) for n = 0..nmax, x >= 0.
void scaled_bessel_i(double x, int nmax, std::span<double> out);
std::vector<double> scaled_bessel_i(double x, int nmax);

// 20-point Gauss-Legendre rule on [-1,1].
const std::vector<double>& gl20_nodes();
const std::vector<double>& gl20_weights();

// n-point Gauss-Legendre rule on [a,b] (Newton iteration on P_n).
struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};
QuadRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Composite 20-point Gauss-Legendre over [a,b] with `panels` equal panels.
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int panels = 1);

// Quadrature nodes for time integrals over [a,b]: unit-width panels up to
// t = 1, then panels growing geometrically by a factor 2. Both ends finite.
struct TimeNodes {
  std::vector<double> t;
  std::vector<double> w;
};
TimeNodes time_nodes(double a, double b);

double integrate_time(const std::function<double(double)>& f, double a,
                      double b);

// Adaptive Gauss-Kronrod on [a,b] with an absolute/relative target. Bisection
// depth is capped at 15, so callers split the range at singular points.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol = 1e-12,
                          double* error = nullptr);

// E_1(x) = int_x^inf e^{-s}/s ds.
double expint_e1(double x);

}  // namespace gffpin
