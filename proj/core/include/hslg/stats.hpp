#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace hslg {

// Streaming moments plus a retained-sample quantile sketch. Merging is exact
// for count and quantiles and uses the pairwise (Chan et al.) update for the
// moments.
class Accumulator {
 public:
  void add(double x);
  void merge(const Accumulator& other);

  long count() const { return n_; }
  double mean() const { return mean_; }
  double m2() const { return m2_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double sd() const;
  double se() const;
  double quantile(double q) const;  // type-7 interpolation
  const std::vector<double>& values() const { return values_; }

 private:
  long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  std::vector<double> values_;
  mutable std::vector<double> sorted_;
  mutable bool dirty_ = true;
};

double quantile(std::vector<double> v, double q);
double median(std::vector<double> v);
double iqr(const std::vector<double>& v);
double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);
double skewness(const std::vector<double>& v);
double excess_kurtosis(const std::vector<double>& v);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};
LinearFit ols(const std::vector<double>& x, const std::vector<double>& y);
// Weighted least squares with weights 1/sigma^2.
LinearFit wls(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& sigma);

struct Interval {
  double lo = 0.0, hi = 0.0;
};
// Percentile bootstrap interval for a statistic of resampled groups: groups[i]
// holds the replicate values at design point i; stat maps one resample of every
// group to a number.
Interval bootstrap_ci(const std::vector<std::vector<double>>& groups,
                      const std::function<double(const std::vector<std::vector<double>>&)>& stat,
                      int resamples, double level, std::uint64_t seed);

// Kolmogorov-Smirnov distances.
double ks_two_sample(std::vector<double> a, std::vector<double> b);
double ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf);

// Integrated autocorrelation-aware standard error via batch means.
double batch_means_se(const std::vector<double>& chain, int batches = 50);

}  // namespace hslg
