#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gffpin {

// Welford accumulator; merge() is associative so per-worker partials can be
// combined in any order.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& other);

  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased
  double stddev() const;
  double sem() const;  // standard error of the mean, iid assumption

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct Estimate {
  double value = 0.0;
  double se = 0.0;
  std::int64_t n = 0;
};

// Integrated autocorrelation time with Sokal's automatic window (c = 5).
// tau = 1/2 + sum_{t>=1} rho(t); returns 0.5 for uncorrelated data.
double integrated_autocorrelation_time(std::span<const double> x,
                                       double c = 5.0);

// Mean with an autocorrelation-corrected standard error.
Estimate correlated_mean(std::span<const double> x, double* tau = nullptr);

// Sample covariance accumulator for a fixed-dimension vector.
class CovarianceAccumulator {
 public:
  explicit CovarianceAccumulator(std::size_t dim);
  void add(std::span<const double> x);
  std::size_t dim() const { return dim_; }
  std::int64_t count() const { return n_; }
  double mean(std::size_t i) const;
  double cov(std::size_t i, std::size_t j) const;
  // Standard error of the covariance estimate assuming a Gaussian vector:
  // sqrt((C_ii C_jj + C_ij^2) / n).
  double cov_se(std::size_t i, std::size_t j) const;

 private:
  std::size_t dim_;
  std::int64_t n_ = 0;
  std::vector<double> sum_;
  std::vector<double> sum2_;
};

}  // namespace gffpin
