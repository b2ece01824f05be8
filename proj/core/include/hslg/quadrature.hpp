#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hslg {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule with n points; cached, thread-safe.
const GaussRule& gauss_legendre(int n);

// Integral of fn over [a, b] with the n-point rule.
double gauss_integrate(const std::function<double(double)>& fn, double a, double b, int n);

// Numerical inverse CDF for a log-concave density exp(h). Panels are bisected
// until the 8- and 16-point Gauss-Legendre masses agree to 1e-6 relative;
// the 16-point values are kept, so the tabulated CDF is far more accurate than
// the refinement threshold. Within a panel quantiles are polished by
// safeguarded Newton iteration on the exact log-density.
class LogConcaveInverter {
 public:
  // h must be concave with its maximum near `mode`; `scale` is a rough width.
  LogConcaveInverter(std::function<double(double)> h, double mode, double scale);

  double quantile(double u) const;
  double cdf(double x) const;
  // log of the integral of exp(h) over the real line.
  double log_mass() const { return log_mass_; }
  double lower() const { return edges_.front(); }
  double upper() const { return edges_.back(); }
  std::size_t panels() const { return edges_.size() - 1; }

 private:
  double partial(std::size_t panel, double x) const;  // normalized mass on [edge, x]

  std::function<double(double)> h_;
  double href_ = 0.0;
  std::vector<double> edges_;
  std::vector<double> cum_;  // normalized cumulative mass at edges
  double log_mass_ = 0.0;
};

}  // namespace hslg
