#pragma once

#include <map>
#include <memory>
#include <shared_mutex>
#include <vector>

#include "hslg/rng.hpp"

namespace hslg {

// log of a Gamma(shape, 1) variate; stays finite for very small shapes.
double log_gamma_variate(double shape, Rng& rng);
double gamma_variate(double shape, Rng& rng);

// 1 / Gamma(beta).
struct InvGamma {
  double beta;
  explicit InvGamma(double beta);
  double sample(Rng& rng) const;
  double log_density(double x) const;
};

// G_{theta,sign}(y) = exp(theta sign y - e^{sign y}) / Gamma(theta); the law of
// sign * log Gamma(theta).
struct LogGammaInc {
  double theta;
  int sign;
  LogGammaInc(double theta, int sign);
  double sample(Rng& rng) const;
  double log_density(double y) const;
  double mean() const;
};

// log U for U ~ Beta(a1, a2).
double log_beta_sample(double a1, double a2, Rng& rng);
double beta_sample(double a1, double a2, Rng& rng);

// Density of log Y1 - log Y2 with Y1, Y2 iid Gamma(theta):
// f(x) = e^{theta x} / (B(theta,theta) (1+e^x)^{2 theta}).
class FTheta {
 public:
  explicit FTheta(double theta);
  double theta() const { return theta_; }
  double sample(Rng& rng) const;
  // Draw from the exponentially tilted law f(x) e^{lambda x} / M(lambda).
  double sample_tilted(double lambda, Rng& rng) const;
  double log_density(double x) const;
  double density(double x) const;
  double dlog_density(double x) const;
  // Same density by 200-point Gauss-Legendre quadrature of the convolution
  // integral G_{theta,+1} * G_{theta,-1}.
  double density_quadrature(double x) const;
  double variance() const;
  // log psi(t), psi(t) = |Gamma(theta+it)|^2 / Gamma(theta)^2.
  double log_psi(double t) const;
  // Same through prod_{n<K} (1 + t^2/(theta+n)^2)^{-1} with a tail integral
  // for the remaining factors.
  double log_psi_product(double t, int factors = 10000) const;
  // log M(lambda) = log E e^{lambda X}, |lambda| < theta.
  double log_mgf(double lambda) const;

 private:
  double theta_;
  double log_norm_;
};

// n-fold convolution densities f^{*m} by Fourier inversion of psi^m. Near the
// centre a trapezoid sum on a cached per-m grid is used; in the tails the
// inversion runs along a saddle-point tilted contour. Thread-safe.
class ConvolutionOracle {
 public:
  explicit ConvolutionOracle(double theta);
  double theta() const { return f_.theta(); }
  const FTheta& base() const { return f_; }

  struct Value {
    double log_value;  // log f^{*m}(y)
    double dlog;       // d/dy log f^{*m}(y)
  };
  Value eval(int m, double y) const;
  double log_density(int m, double y) const { return eval(m, y).log_value; }
  double density(int m, double y) const;

  // Plain trapezoid inversion on a grid of step h, no tilting; exposed for
  // cross-checks.
  double density_untilted(int m, double y) const;
  Value eval_tilted(int m, double y) const;

 private:
  struct Table {
    double h = 0.0;
    double central = 0.0;
    std::vector<double> a;  // w_k psi(t_k)^m
  };
  std::shared_ptr<const Table> table(int m) const;
  Table build(int m) const;

  FTheta f_;
  double var1_;
  mutable std::shared_mutex mu_;
  mutable std::map<int, std::shared_ptr<const Table>> tables_;
};

// Density proportional to exp(A x - C e^x - D e^{-x}), with C = e^{logC},
// D = e^{logD} (either may be zero via -inf). Every single-site conditional of
// the Gibbs measures, and every q-distribution, has this form.
class LogGig {
 public:
  LogGig(double A, double logC, double logD);

  double A() const { return A_; }
  double logC() const { return logC_; }
  double logD() const { return logD_; }

  double log_density_unnorm(double x) const;
  double log_normalizer() const;
  double log_density(double x) const { return log_density_unnorm(x) - log_normalizer(); }
  double mode() const { return shift_ + ymode_; }
  double sample(Rng& rng) const;       // exact
  double quantile(double u) const;     // numerical inverse CDF, monotone in u
  double cdf(double x) const;

 private:
  enum class Kind { Both, Upper, Lower };
  double h(double y) const;
  double dh(double y) const;
  double d2h(double y) const;

  double A_, logC_, logD_;
  Kind kind_;
  double shift_ = 0.0;
  double kappa_ = 1.0;
  double ymode_ = 0.0;
};

// q_{theta1,theta2;sign}^{(a,b)}(x) proportional to
// G_{theta1,sign}(a-x) G_{theta2,sign}(b-x).
struct QDist {
  double theta1, theta2;
  int sign;
  double a, b;
  QDist(double theta1, double theta2, int sign, double a, double b);
  LogGig law() const;
  double sample(Rng& rng) const;
  double log_density(double x) const;
  double mode() const;
};

}  // namespace hslg
