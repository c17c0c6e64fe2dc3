#include "gffpin/stats.hpp"

#include <cmath>
#include <utility>

namespace gffpin {

void RunningStats::add(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void RunningStats::merge(const RunningStats& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double n = static_cast<double>(n_ + o.n_);
  const double d = o.mean_ - mean_;
  mean_ += d * static_cast<double>(o.n_) / n;
  m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
  n_ += o.n_;
}

double RunningStats::variance() const {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningStats::stddev() const { return std::sqrt(variance()); }

double RunningStats::sem() const {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double integrated_autocorrelation_time(std::span<const double> x, double c) {
  const std::size_t n = x.size();
  if (n < 4) return 0.5;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double v : x) c0 += (v - mean) * (v - mean);
  c0 /= static_cast<double>(n);
  if (c0 <= 0.0) return 0.5;
  double tau = 0.5;
  for (std::size_t t = 1; t < n / 2; ++t) {
    double ct = 0.0;
    for (std::size_t i = 0; i + t < n; ++i) ct += (x[i] - mean) * (x[i + t] - mean);
    ct /= static_cast<double>(n);
    tau += ct / c0;
    if (static_cast<double>(t) >= c * tau) break;
  }
  return tau < 0.5 ? 0.5 : tau;
}

Estimate correlated_mean(std::span<const double> x, double* tau_out) {
  Estimate e;
  e.n = static_cast<std::int64_t>(x.size());
  if (x.empty()) return e;
  RunningStats rs;
  for (double v : x) rs.add(v);
  const double tau = integrated_autocorrelation_time(x);
  e.value = rs.mean();
  e.se = std::sqrt(2.0 * tau * rs.variance() / static_cast<double>(x.size()));
  if (tau_out) *tau_out = tau;
  return e;
}

CovarianceAccumulator::CovarianceAccumulator(std::size_t dim)
    : dim_(dim), sum_(dim, 0.0), sum2_(dim * dim, 0.0) {}

void CovarianceAccumulator::add(std::span<const double> x) {
  ++n_;
  for (std::size_t i = 0; i < dim_; ++i) {
    sum_[i] += x[i];
    double* row = &sum2_[i * dim_];
    const double xi = x[i];
    for (std::size_t j = i; j < dim_; ++j) row[j] += xi * x[j];
  }
}

double CovarianceAccumulator::mean(std::size_t i) const {
  return sum_[i] / static_cast<double>(n_);
}

double CovarianceAccumulator::cov(std::size_t i, std::size_t j) const {
  if (j < i) std::swap(i, j);
  const double n = static_cast<double>(n_);
  return (sum2_[i * dim_ + j] - sum_[i] * sum_[j] / n) / (n - 1.0);
}

double CovarianceAccumulator::cov_se(std::size_t i, std::size_t j) const {
  const double cij = cov(i, j);
  return std::sqrt((cov(i, i) * cov(j, j) + cij * cij) / static_cast<double>(n_));
}

}  // namespace gffpin
