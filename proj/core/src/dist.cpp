#include "hslg/dist.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include "hslg/errors.hpp"
#include "hslg/quadrature.hpp"
#include "hslg/specfun.hpp"

namespace hslg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
constexpr double kCut = 46.0;  // e^{-46} ~ 1e-20

double logsumexp2(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Re log Gamma(theta + i t) for theta > 0.
double re_lgamma(double theta, double t) {
  double z = theta;
  double prod = 1.0;
  double acc = 0.0;
  const double t2 = t * t;
  while (z * z + t2 < 100.0) {
    prod *= z * z + t2;
    if (prod > 1e250) {
      acc -= 0.5 * std::log(prod);
      prod = 1.0;
    }
    z += 1.0;
  }
  acc -= 0.5 * std::log(prod);
  const std::complex<double> w(z, t);
  const std::complex<double> iw = 1.0 / w;
  const std::complex<double> iw2 = iw * iw;
  const std::complex<double> series =
      iw * (1.0 / 12 +
            iw2 * (-1.0 / 360 +
                   iw2 * (1.0 / 1260 +
                          iw2 * (-1.0 / 1680 +
                                 iw2 * (1.0 / 1188 + iw2 * (-691.0 / 360360 + iw2 * (1.0 / 156)))))));
  const double log_abs = 0.5 * std::log(z * z + t2);
  const double arg = std::atan2(t, z);
  // Re[(w - 1/2) log w - w]
  const double main = (z - 0.5) * log_abs - t * arg - z;
  return acc + main + 0.5 * std::log(2.0 * kPi) + series.real();
}

}  // namespace

double gamma_variate(double shape, Rng& rng) {
  if (!(shape > 0.0)) throw DomainError("gamma_variate: shape must be positive");
  std::gamma_distribution<double> g(shape, 1.0);
  return g(rng);
}

double log_gamma_variate(double shape, Rng& rng) {
  if (!(shape > 0.0)) throw DomainError("log_gamma_variate: shape must be positive");
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a+1) U^{1/a}
    const double g = gamma_variate(shape + 1.0, rng);
    return std::log(g) + std::log(uniform01(rng)) / shape;
  }
  return std::log(gamma_variate(shape, rng));
}

InvGamma::InvGamma(double b) : beta(b) {
  if (!(b > 0.0)) throw DomainError("InvGamma: beta must be positive");
}

double InvGamma::sample(Rng& rng) const { return std::exp(-log_gamma_variate(beta, rng)); }

double InvGamma::log_density(double x) const {
  if (!(x > 0.0)) return -kInf;
  return -std::lgamma(beta) - (beta + 1.0) * std::log(x) - 1.0 / x;
}

LogGammaInc::LogGammaInc(double t, int s) : theta(t), sign(s) {
  if (!(t > 0.0)) throw DomainError("LogGammaInc: theta must be positive");
  if (s != 1 && s != -1) throw DomainError("LogGammaInc: sign must be +1 or -1");
}

double LogGammaInc::sample(Rng& rng) const { return sign * log_gamma_variate(theta, rng); }

double LogGammaInc::log_density(double y) const {
  const double sy = sign * y;
  return theta * sy - std::exp(sy) - std::lgamma(theta);
}

double LogGammaInc::mean() const { return sign * digamma(theta); }

double log_beta_sample(double a1, double a2, Rng& rng) {
  if (!(a1 > 0.0) || !(a2 > 0.0)) throw DomainError("beta_sample: parameters must be positive");
  const double l1 = log_gamma_variate(a1, rng);
  const double l2 = log_gamma_variate(a2, rng);
  return l1 - logsumexp2(l1, l2);
}

double beta_sample(double a1, double a2, Rng& rng) { return std::exp(log_beta_sample(a1, a2, rng)); }

FTheta::FTheta(double theta) : theta_(theta) {
  if (!(theta > 0.0)) throw DomainError("FTheta: theta must be positive");
  log_norm_ = std::lgamma(2.0 * theta) - 2.0 * std::lgamma(theta);
}

double FTheta::sample(Rng& rng) const {
  const double a = log_gamma_variate(theta_, rng);
  return a - log_gamma_variate(theta_, rng);
}

double FTheta::sample_tilted(double lambda, Rng& rng) const {
  if (!(std::abs(lambda) < theta_)) throw DomainError("FTheta::sample_tilted: need |lambda| < theta");
  const double a = log_gamma_variate(theta_ + lambda, rng);
  return a - log_gamma_variate(theta_ - lambda, rng);
}

double FTheta::log_density(double x) const {
  const double ax = std::abs(x);
  return log_norm_ - theta_ * ax - 2.0 * theta_ * std::log1p(std::exp(-ax));
}

double FTheta::density(double x) const { return std::exp(log_density(x)); }

double FTheta::dlog_density(double x) const { return -theta_ * std::tanh(0.5 * x); }

double FTheta::density_quadrature(double x) const {
  // integrand in y: exp(2 theta y - e^y (1 + e^{-x}) - theta x) / Gamma(theta)^2
  const double c = 1.0 + std::exp(-x);
  const double ystar = std::log(2.0 * theta_ / c);
  const double lo = ystar - (23.0 / theta_ + 2.0);
  const double hi = ystar + 5.0;
  const double lg = 2.0 * std::lgamma(theta_);
  auto fn = [&](double y) { return std::exp(2.0 * theta_ * y - std::exp(y) * c - theta_ * x - lg); };
  return gauss_integrate(fn, lo, hi, 200);
}

double FTheta::variance() const { return 2.0 * trigamma(theta_); }

double FTheta::log_psi(double t) const {
  if (t == 0.0) return 0.0;
  return 2.0 * (re_lgamma(theta_, t) - std::lgamma(theta_));
}

double FTheta::log_psi_product(double t, int factors) const {
  double s = 0.0;
  const double t2 = t * t;
  for (int n = 0; n < factors; ++n) {
    const double u = theta_ + n;
    s += std::log1p(t2 / (u * u));
  }
  const double a = theta_ + factors - 0.5;
  // sum_{n >= K} log(1 + t^2/(theta+n)^2) by the midpoint rule plus its first correction
  const double integral = 2.0 * t * std::atan(t / a) - a * std::log1p(t2 / (a * a));
  const double correction = -t2 / (12.0 * a * (a * a + t2));
  return -(s + integral + correction);
}

double FTheta::log_mgf(double lambda) const {
  if (!(std::abs(lambda) < theta_)) throw DomainError("FTheta::log_mgf: need |lambda| < theta");
  return std::lgamma(theta_ + lambda) + std::lgamma(theta_ - lambda) - 2.0 * std::lgamma(theta_);
}

ConvolutionOracle::ConvolutionOracle(double theta) : f_(theta), var1_(2.0 * trigamma(theta)) {}

ConvolutionOracle::Table ConvolutionOracle::build(int m) const {
  Table t;
  const double th = f_.theta();
  const double sd = std::sqrt(m * var1_);
  t.central = 5.0 * sd + 10.0 / th + 3.0;
  const double cover = 15.0 * sd + 40.0 / th + 10.0;
  t.h = kPi / (t.central + cover);
  constexpr std::size_t kMaxNodes = 2'000'000;
  for (std::size_t k = 0;; ++k) {
    const double lp = m * f_.log_psi(k * t.h);
    if (lp < -kCut) break;
    t.a.push_back(std::exp(lp) * (k == 0 ? 0.5 : 1.0));
    if (t.a.size() > kMaxNodes) {
      std::ostringstream os;
      os << "ConvolutionOracle: Fourier grid under-resolved for m=" << m << " (h=" << t.h
         << ", nodes>" << kMaxNodes << ")";
      throw NumericalError(os.str());
    }
  }
  return t;
}

std::shared_ptr<const ConvolutionOracle::Table> ConvolutionOracle::table(int m) const {
  {
    std::shared_lock lock(mu_);
    auto it = tables_.find(m);
    if (it != tables_.end()) return it->second;
  }
  auto fresh = std::make_shared<const Table>(build(m));
  std::unique_lock lock(mu_);
  auto [it, inserted] = tables_.emplace(m, fresh);
  return it->second;
}

ConvolutionOracle::Value ConvolutionOracle::eval(int m, double y) const {
  if (m <= 0) throw DomainError("ConvolutionOracle: m must be positive");
  if (m == 1) return {f_.log_density(y), f_.dlog_density(y)};
  const auto tab = table(m);
  if (std::abs(y) <= tab->central) {
    const std::complex<double> rot(std::cos(tab->h * y), std::sin(tab->h * y));
    std::complex<double> z(1.0, 0.0);
    double s = 0.0, ds = 0.0, peak = 0.0;
    for (std::size_t k = 0; k < tab->a.size(); ++k) {
      s += tab->a[k] * z.real();
      ds -= tab->a[k] * (k * tab->h) * z.imag();
      peak += tab->a[k];
      z *= rot;
    }
    if (s > 1e-7 * peak) return {std::log(s * tab->h / kPi), ds / s};
  }
  return eval_tilted(m, y);
}

double ConvolutionOracle::density(int m, double y) const { return std::exp(eval(m, y).log_value); }

double ConvolutionOracle::density_untilted(int m, double y) const {
  if (m <= 0) throw DomainError("ConvolutionOracle: m must be positive");
  const double th = f_.theta();
  const double sd = std::sqrt(m * var1_);
  const double h = kPi / (std::abs(y) + 15.0 * sd + 40.0 / th + 10.0);
  double s = 0.0;
  for (std::size_t k = 0;; ++k) {
    const double lp = m * f_.log_psi(k * h);
    if (lp < -kCut) break;
    s += std::exp(lp) * std::cos(k * h * y) * (k == 0 ? 0.5 : 1.0);
    if (k > 20'000'000) throw NumericalError("ConvolutionOracle: untilted grid under-resolved");
  }
  return s * h / kPi;
}

ConvolutionOracle::Value ConvolutionOracle::eval_tilted(int m, double y) const {
  const double th = f_.theta();
  // saddle point: m (Psi(th+l) - Psi(th-l)) = y
  double lo = -th, hi = th;
  double lam = std::clamp(y / (m * var1_), -0.5 * th, 0.5 * th);
  for (int it = 0; it < 200; ++it) {
    const double g = m * (digamma(th + lam) - digamma(th - lam)) - y;
    if (g > 0)
      hi = lam;
    else
      lo = lam;
    const double dg = m * (trigamma(th + lam) + trigamma(th - lam));
    double next = lam - g / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - lam) < 1e-15 * th) {
      lam = next;
      break;
    }
    lam = next;
  }
  const double a1 = th + lam, a2 = th - lam;
  const double sd = std::sqrt(m * (trigamma(a1) + trigamma(a2)));
  const double h = kPi / (15.0 * sd + 40.0 / std::min(a1, a2) + 10.0);
  const double base = std::lgamma(a1) + std::lgamma(a2);
  double s = 0.0, ds = 0.0;
  for (std::size_t k = 0;; ++k) {
    const double t = k * h;
    std::complex<double> e;
    if (k == 0) {
      e = 0.0;
    } else {
      const std::complex<double> g1 = lgamma_complex({a1, t});
      const std::complex<double> g2 = std::conj(lgamma_complex({a2, t}));
      e = static_cast<double>(m) * (g1 + g2 - base) - std::complex<double>(0.0, t * y);
    }
    if (e.real() < -kCut) break;
    const std::complex<double> v = std::exp(e) * (k == 0 ? 0.5 : 1.0);
    s += v.real();
    ds += t * v.imag();
    if (k > 5'000'000) throw NumericalError("ConvolutionOracle: tilted grid under-resolved");
  }
  if (!(s > 0.0)) throw NumericalError("ConvolutionOracle: tilted inversion lost positivity");
  const double logk = base - 2.0 * std::lgamma(th);
  return {std::log(s * h / kPi) + m * logk - lam * y, -lam + ds / s};
}

LogGig::LogGig(double A, double logC, double logD) : A_(A), logC_(logC), logD_(logD) {
  if (std::isnan(A) || std::isnan(logC) || std::isnan(logD) || logC == kInf || logD == kInf)
    throw DomainError("LogGig: invalid parameters");
  const bool hasC = logC > -kInf;
  const bool hasD = logD > -kInf;
  if (hasC && hasD) {
    kind_ = Kind::Both;
    shift_ = 0.5 * (logD - logC);
    kappa_ = 0.5 * (logC + logD);  // log kappa
    const double r = 0.5 * A * std::exp(-kappa_);
    if (std::abs(r) < 1e150)
      ymode_ = std::asinh(r);
    else
      ymode_ = (A > 0 ? 1.0 : -1.0) * (std::log(std::abs(A)) - kappa_);
  } else if (hasC) {
    if (!(A > 0.0)) throw DomainError("LogGig: not integrable (no lower confinement)");
    kind_ = Kind::Upper;
    shift_ = -logC;
    ymode_ = std::log(A);
  } else if (hasD) {
    if (!(A < 0.0)) throw DomainError("LogGig: not integrable (no upper confinement)");
    kind_ = Kind::Lower;
    shift_ = logD;
    ymode_ = -std::log(-A);
  } else {
    throw DomainError("LogGig: not integrable (no confinement)");
  }
}

double LogGig::h(double y) const {
  switch (kind_) {
    case Kind::Both:
      return A_ * y - std::exp(kappa_ + y) - std::exp(kappa_ - y);
    case Kind::Upper:
      return A_ * y - std::exp(y);
    case Kind::Lower:
      return A_ * y - std::exp(-y);
  }
  return 0.0;
}

double LogGig::dh(double y) const {
  switch (kind_) {
    case Kind::Both:
      return A_ - std::exp(kappa_ + y) + std::exp(kappa_ - y);
    case Kind::Upper:
      return A_ - std::exp(y);
    case Kind::Lower:
      return A_ + std::exp(-y);
  }
  return 0.0;
}

double LogGig::d2h(double y) const {
  switch (kind_) {
    case Kind::Both:
      return -std::exp(kappa_ + y) - std::exp(kappa_ - y);
    case Kind::Upper:
      return -std::exp(y);
    case Kind::Lower:
      return -std::exp(-y);
  }
  return 0.0;
}

double LogGig::log_density_unnorm(double x) const {
  double v = A_ * x;
  if (logC_ > -kInf) v -= std::exp(logC_ + x);
  if (logD_ > -kInf) v -= std::exp(logD_ - x);
  return v;
}

double LogGig::log_normalizer() const {
  double ly = 0.0;
  switch (kind_) {
    case Kind::Upper:
      ly = std::lgamma(A_);
      break;
    case Kind::Lower:
      ly = std::lgamma(-A_);
      break;
    case Kind::Both: {
      const double twok = 2.0 * std::exp(kappa_);
      double k = 0.0;
      if (twok > 1e-8 && twok < 600.0) k = std::cyl_bessel_k(std::abs(A_), twok);
      if (k > 1e-290 && std::isfinite(k)) {
        ly = std::log(2.0 * k);
      } else {
        const double c = -d2h(ymode_);
        LogConcaveInverter inv([this](double y) { return h(y); }, ymode_, 1.0 / std::sqrt(c));
        ly = inv.log_mass();
      }
      break;
    }
  }
  return A_ * shift_ + ly;
}

double LogGig::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::Upper:
      return shift_ + log_gamma_variate(A_, rng);
    case Kind::Lower:
      return shift_ - log_gamma_variate(-A_, rng);
    case Kind::Both:
      break;
  }
  const double m = ymode_;
  const double hm = h(m);
  const double s0 = 1.0 / std::sqrt(-d2h(m));
  auto solve = [&](double dir) {
    double y = m + dir * s0;
    for (int it = 0; it < 8; ++it) {
      const double phi = h(y) - hm + 1.0;
      const double next = y - phi / dh(y);
      if (!(dir * (next - m) > 0.0)) break;
      if (std::abs(next - y) < 1e-6 * s0) {
        y = next;
        break;
      }
      y = next;
    }
    return y;
  };
  const double yl = solve(-1.0);
  const double yr = solve(1.0);
  const double hl = h(yl) - hm, hr = h(yr) - hm;
  const double sl = dh(yl), sr = dh(yr);
  const double wmid = yr - yl;
  const double wl = std::exp(hl) / sl;
  const double wr = std::exp(hr) / (-sr);
  const double total = wmid + wl + wr;
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double u = uniform01(rng) * total;
    double y, env;
    if (u < wmid) {
      y = yl + u / wmid * (yr - yl);
      env = 0.0;
    } else if (u < wmid + wl) {
      y = yl + std::log(uniform01(rng)) / sl;
      env = hl + sl * (y - yl);
    } else {
      y = yr + std::log(uniform01(rng)) / sr;
      env = hr + sr * (y - yr);
    }
    if (std::log(uniform01(rng)) <= h(y) - hm - env) return shift_ + y;
  }
  throw NumericalError("LogGig::sample: rejection sampler failed to accept");
}

double LogGig::quantile(double u) const {
  const double c = -d2h(ymode_);
  LogConcaveInverter inv([this](double y) { return h(y); }, ymode_, 1.0 / std::sqrt(c));
  return shift_ + inv.quantile(u);
}

double LogGig::cdf(double x) const {
  const double c = -d2h(ymode_);
  LogConcaveInverter inv([this](double y) { return h(y); }, ymode_, 1.0 / std::sqrt(c));
  return inv.cdf(x - shift_);
}

QDist::QDist(double t1, double t2, int s, double a_, double b_)
    : theta1(t1), theta2(t2), sign(s), a(a_), b(b_) {
  if (!(t1 > 0.0) || !(t2 > 0.0)) throw DomainError("QDist: thetas must be positive");
  if (s != 1 && s != -1) throw DomainError("QDist: sign must be +1 or -1");
}

LogGig QDist::law() const {
  const double k = theta1 + theta2;
  if (sign == 1) return LogGig(-k, -kInf, logsumexp2(a, b));
  return LogGig(k, logsumexp2(-a, -b), -kInf);
}

double QDist::sample(Rng& rng) const { return law().sample(rng); }
double QDist::log_density(double x) const { return law().log_density(x); }
double QDist::mode() const { return law().mode(); }

}  // namespace hslg
