#include "gffpin/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "gffpin/common.hpp"

namespace gffpin {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kSqrt2 = 1.41421356237309504880;

// Robert (1995) exponential proposal for N(0,1) restricted to [a,b], a > 0.
double tail_rejection(double a, double b, Rng& rng) {
  if (b - a < 1.0 / a) {
    for (;;) {
      const double z = a + (b - a) * rng.uniform();
      if (std::log(rng.uniform()) <= 0.5 * (a * a - z * z)) return z;
    }
  }
  const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double z = a - std::log(rng.uniform()) / alpha;
    if (z > b) continue;
    const double d = z - alpha;
    if (std::log(rng.uniform()) <= -0.5 * d * d) return z;
  }
}

double sample_upper(double a, double b, Rng& rng) {
  // 0 <= a < b <= inf
  if (a > 30.0) return tail_rejection(a, b, rng);
  const double qa = normal_sf(a);
  const double qb = std::isinf(b) ? 0.0 : normal_sf(b);
  const double q = qb + (qa - qb) * rng.uniform();
  double z = normal_isf(q);
  return std::clamp(z, a, b);
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z * kInvSqrt2); }

double normal_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  if (p < 0.5) return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
  return kSqrt2 * boost::math::erfc_inv(2.0 * (1.0 - p));
}

double normal_isf(double q) { return -normal_quantile(q); }

double normal_mass(double a, double b) {
  if (b <= a) return 0.0;
  if (a >= 0.0) return normal_sf(a) - normal_sf(b);
  if (b <= 0.0) return normal_cdf(b) - normal_cdf(a);
  return 1.0 - normal_cdf(a) - normal_sf(b);
}

double sample_truncated_normal(double a, double b, Rng& rng) {
  if (!(a < b)) throw DomainError("truncated normal: empty interval");
  if (a >= 0.0) return sample_upper(a, b, rng);
  if (b <= 0.0) return -sample_upper(-b, -a, rng);
  const double pa = normal_cdf(a);
  const double pb = normal_cdf(b);
  const double p = pa + (pb - pa) * rng.uniform();
  double z;
  if (p < 0.5) {
    z = normal_quantile(p);
  } else {
    // Work with the upper tail for accuracy near 1.
    const double qa = normal_sf(a), qb = normal_sf(b);
    z = normal_isf(qb + (qa - qb) * (pb - p) / (pb - pa));
  }
  return std::clamp(z, a, b);
}

void scaled_bessel_i(double x, int nmax, std::span<double> out) {
  if (x < 0.0) throw DomainError("scaled_bessel_i: x < 0");
  if (nmax < 0) return;
  std::fill(out.begin(), out.begin() + nmax + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return;
  }
  if (x < 1e-8) {
    // Leading series terms; I_n(x) ~ (x/2)^n / n!.
    const double e = std::exp(-x);
    out[0] = e * (1.0 + 0.25 * x * x);
    double term = e;
    for (int n = 1; n <= nmax; ++n) {
      term *= 0.5 * x / n;
      if (term == 0.0) break;
      out[n] = term;
    }
    return;
  }
  if (x <= 2000.0) {
    // Miller backward recurrence, normalised by exp(-x)(I_0 + 2 sum I_n) = 1.
    const int start = nmax + 20 + static_cast<int>(std::sqrt(80.0 * x));
    double ip1 = 0.0, in = 1e-280, sum = 0.0;
    for (int n = start; n >= 1; --n) {
      const double im1 = (2.0 * n / x) * in + ip1;
      if (n <= nmax) out[n] = in;
      sum += 2.0 * in;
      ip1 = in;
      in = im1;
      if (in > 1e250) {
        const double s = 1e-250;
        in *= s;
        ip1 *= s;
        sum *= s;
        for (int j = n; j <= nmax; ++j) out[j] *= s;
      }
    }
    out[0] = in;
    sum += in;
    for (int n = 0; n <= nmax; ++n) out[n] /= sum;
    return;
  }
  // exp(-x) I_n(x) = (1/pi) int_0^pi exp(-x(1 - cos th)) cos(n th) dth;
  // the integrand is negligible beyond th ~ sqrt(100/x).
  const double thmax = std::min(kPi, 1.05 * std::sqrt(100.0 / x));
  const int panels = std::max(4, static_cast<int>(std::ceil(nmax * thmax / 1.5)));
  const auto& xs = gl20_nodes();
  const auto& ws = gl20_weights();
  const double h = thmax / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = (p + 0.5) * h;
    for (std::size_t q = 0; q < xs.size(); ++q) {
      const double th = c + 0.5 * h * xs[q];
      // 1 - cos th = 2 sin^2(th/2)
      const double s = std::sin(0.5 * th);
      const double g = 0.5 * h * ws[q] * std::exp(-2.0 * x * s * s) / kPi;
      const double c1 = std::cos(th);
      double cm = 1.0, cn = c1;
      out[0] += g;
      if (nmax >= 1) out[1] += g * c1;
      for (int n = 2; n <= nmax; ++n) {
        const double cp = 2.0 * c1 * cn - cm;
        out[n] += g * cp;
        cm = cn;
        cn = cp;
      }
    }
  }
}

std::vector<double> scaled_bessel_i(double x, int nmax) {
  std::vector<double> out(static_cast<std::size_t>(nmax) + 1);
  scaled_bessel_i(x, nmax, out);
  return out;
}

const std::vector<double>& gl20_nodes() {
  static const std::vector<double> nodes = [] {
    const auto& a = boost::math::quadrature::gauss<double, 20>::abscissa();
    std::vector<double> v;
    for (auto it = a.rbegin(); it != a.rend(); ++it) v.push_back(-*it);
    for (double z : a) v.push_back(z);
    return v;
  }();
  return nodes;
}

const std::vector<double>& gl20_weights() {
  static const std::vector<double> weights = [] {
    const auto& a = boost::math::quadrature::gauss<double, 20>::weights();
    std::vector<double> v;
    for (auto it = a.rbegin(); it != a.rend(); ++it) v.push_back(*it);
    for (double z : a) v.push_back(z);
    return v;
  }();
  return weights;
}

QuadRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
  QuadRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    r.x[i] = c + h * r.x[i];
    r.w[i] *= h;
  }
  return r;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int panels) {
  const auto& xs = gl20_nodes();
  const auto& ws = gl20_weights();
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    double s = 0.0;
    for (std::size_t q = 0; q < xs.size(); ++q) s += ws[q] * f(c + 0.5 * h * xs[q]);
    total += 0.5 * h * s;
  }
  return total;
}

TimeNodes time_nodes(double a, double b) {
  TimeNodes tn;
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("time_nodes: interval must be finite");
  if (!(b > a)) return tn;
  const auto& xs = gl20_nodes();
  const auto& ws = gl20_weights();
  auto add_panel = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    for (std::size_t q = 0; q < xs.size(); ++q) {
      tn.t.push_back(c + h * xs[q]);
      tn.w.push_back(h * ws[q]);
    }
  };
  double lo = a;
  while (lo < b) {
    double hi;
    if (lo < 1.0) {
      hi = std::min({b, 1.0, std::floor(lo * 4.0 + 1.0) / 4.0});
    } else {
      hi = std::min(b, 2.0 * lo);
    }
    if (hi <= lo) hi = std::min(b, lo + 0.25);
    add_panel(lo, hi);
    lo = hi;
  }
  return tn;
}

double integrate_time(const std::function<double(double)>& f, double a,
                      double b) {
  const TimeNodes tn = time_nodes(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < tn.t.size(); ++i) s += tn.w[i] * f(tn.t[i]);
  return s;
}

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol, double* error) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 15, tol, &err);
  if (error) *error = err;
  return v;
}

double expint_e1(double x) { return boost::math::expint(1, x); }

}  // namespace gffpin
