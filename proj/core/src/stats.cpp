#include "hslg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hslg/errors.hpp"
#include "hslg/rng.hpp"

namespace hslg {

void Accumulator::add(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
  values_.push_back(x);
  dirty_ = true;
}

void Accumulator::merge(const Accumulator& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double d = o.mean_ - mean_;
  mean_ = (na * mean_ + nb * o.mean_) / n;
  m2_ += o.m2_ + d * d * na * nb / n;
  n_ += o.n_;
  values_.insert(values_.end(), o.values_.begin(), o.values_.end());
  dirty_ = true;
}

double Accumulator::sd() const { return std::sqrt(variance()); }
double Accumulator::se() const { return n_ > 1 ? sd() / std::sqrt(static_cast<double>(n_)) : 0.0; }

double Accumulator::quantile(double q) const {
  if (values_.empty()) throw EstimationError("Accumulator::quantile: empty");
  if (dirty_) {
    sorted_ = values_;
    std::sort(sorted_.begin(), sorted_.end());
    dirty_ = false;
  }
  const double h = q * static_cast<double>(sorted_.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted_.size() - 1);
  return sorted_[lo] + (h - static_cast<double>(lo)) * (sorted_[hi] - sorted_[lo]);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw EstimationError("quantile: empty sample");
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }
double iqr(const std::vector<double>& v) { return quantile(v, 0.75) - quantile(v, 0.25); }

double mean(const std::vector<double>& v) {
  if (v.empty()) throw EstimationError("mean: empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

namespace {
double central_moment(const std::vector<double>& v, int k) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += std::pow(x - m, k);
  return s / static_cast<double>(v.size());
}
}  // namespace

double skewness(const std::vector<double>& v) {
  const double m2 = central_moment(v, 2);
  return central_moment(v, 3) / std::pow(m2, 1.5);
}

double excess_kurtosis(const std::vector<double>& v) {
  const double m2 = central_moment(v, 2);
  return central_moment(v, 4) / (m2 * m2) - 3.0;
}

LinearFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  return wls(x, y, std::vector<double>(x.size(), 1.0));
}

LinearFit wls(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& sigma) {
  if (x.size() != y.size() || x.size() != sigma.size() || x.size() < 2) throw DomainError("least squares: need >= 2 matched points");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (sigma[i] * sigma[i]);
    sw += w;
    sx += w * x[i];
    sy += w * y[i];
  }
  const double xb = sx / sw, yb = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (sigma[i] * sigma[i]);
    sxx += w * (x[i] - xb) * (x[i] - xb);
    sxy += w * (x[i] - xb) * (y[i] - yb);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = yb - f.slope * xb;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    rss += r * r / (sigma[i] * sigma[i]);
  }
  const bool unit = std::all_of(sigma.begin(), sigma.end(), [](double s) { return s == 1.0; });
  if (unit) {
    f.slope_se = x.size() > 2 ? std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx) : 0.0;
  } else {
    f.slope_se = std::sqrt(1.0 / sxx);
  }
  return f;
}

Interval bootstrap_ci(const std::vector<std::vector<double>>& groups,
                      const std::function<double(const std::vector<std::vector<double>>&)>& stat, int resamples,
                      double level, std::uint64_t seed) {
  Rng rng(stream_key(seed, 0xB007, 0), 0);
  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(resamples));
  std::vector<std::vector<double>> rs(groups.size());
  for (int b = 0; b < resamples; ++b) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto& src = groups[g];
      rs[g].resize(src.size());
      for (auto& v : rs[g]) v = src[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(src.size()))];
    }
    stats.push_back(stat(rs));
  }
  const double a = (1.0 - level) / 2.0;
  return {quantile(stats, a), quantile(stats, 1.0 - a)};
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw EstimationError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf) {
  if (a.empty()) throw EstimationError("ks_one_sample: empty sample");
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double F = cdf(a[i]);
    d = std::max({d, std::abs(static_cast<double>(i + 1) / n - F), std::abs(F - static_cast<double>(i) / n)});
  }
  return d;
}

double batch_means_se(const std::vector<double>& chain, int batches) {
  const std::size_t len = chain.size() / static_cast<std::size_t>(batches);
  if (len < 1 || batches < 2) throw EstimationError("batch_means_se: chain too short");
  std::vector<double> bm;
  for (int b = 0; b < batches; ++b) {
    double s = 0;
    for (std::size_t k = 0; k < len; ++k) s += chain[static_cast<std::size_t>(b) * len + k];
    bm.push_back(s / static_cast<double>(len));
  }
  return std::sqrt(variance(bm) / static_cast<double>(batches));
}

}  // namespace hslg
