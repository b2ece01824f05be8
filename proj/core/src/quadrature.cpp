#include "hslg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "hslg/errors.hpp"

namespace hslg {
namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

template <class F>
double integrate(const GaussRule& rule, F&& fn, double a, double b) {
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * fn(c + r * rule.nodes[i]);
  return s * r;
}

constexpr double kTailDrop = 46.0;

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

double gauss_integrate(const std::function<double(double)>& fn, double a, double b, int n) {
  return integrate(gauss_legendre(n), fn, a, b);
}

LogConcaveInverter::LogConcaveInverter(std::function<double(double)> h, double mode, double scale)
    : h_(std::move(h)) {
  if (!(scale > 0.0) || !std::isfinite(mode)) throw DomainError("LogConcaveInverter: bad mode/scale");
  href_ = h_(mode);
  if (!std::isfinite(href_)) throw NumericalError("LogConcaveInverter: log-density not finite at mode");
  auto reach = [&](double dir) {
    double step = scale;
    for (int k = 0; k < 200; ++k) {
      const double x = mode + dir * step;
      if (h_(x) - href_ < -kTailDrop) return x;
      step *= 2.0;
    }
    throw NumericalError("LogConcaveInverter: tail never decays (grid saturation)");
  };
  const double lo = reach(-1.0);
  const double hi = reach(1.0);

  std::vector<double> seeds{lo, mode, hi};
  for (double d = scale; mode - d > lo; d *= 2.0) seeds.push_back(mode - d);
  for (double d = scale; mode + d < hi; d *= 2.0) seeds.push_back(mode + d);
  std::sort(seeds.begin(), seeds.end());

  const GaussRule& g8 = gauss_legendre(8);
  const GaussRule& g16 = gauss_legendre(16);
  auto dens = [&](double x) { return std::exp(h_(x) - href_); };
  const double negligible = 1e-22 * scale;

  std::vector<std::pair<double, double>> done;  // (right edge, mass), sorted by construction
  for (std::size_t s = 0; s + 1 < seeds.size(); ++s) {
    std::vector<std::pair<double, double>> stack{{seeds[s], seeds[s + 1]}};
    std::vector<std::pair<double, double>> local;
    while (!stack.empty()) {
      auto [a, b] = stack.back();
      stack.pop_back();
      const double i16 = integrate(g16, dens, a, b);
      const double i8 = integrate(g8, dens, a, b);
      const bool fine = std::abs(i16 - i8) <= 1e-6 * i16 || i16 < negligible || (b - a) < 1e-12 * scale;
      if (fine) {
        local.push_back({a, b});
        continue;
      }
      const double m = 0.5 * (a + b);
      stack.push_back({m, b});
      stack.push_back({a, m});
    }
    // stack order yields panels left to right
    for (auto [a, b] : local) {
      if (edges_.empty()) edges_.push_back(a);
      edges_.push_back(b);
      done.push_back({b, integrate(g16, dens, a, b)});
    }
  }
  cum_.assign(edges_.size(), 0.0);
  for (std::size_t i = 0; i < done.size(); ++i) cum_[i + 1] = cum_[i] + done[i].second;
  const double total = cum_.back();
  if (!(total > 0.0) || !std::isfinite(total)) throw NumericalError("LogConcaveInverter: zero mass");
  for (double& c : cum_) c /= total;
  log_mass_ = std::log(total) + href_;
}

double LogConcaveInverter::partial(std::size_t panel, double x) const {
  const double a = edges_[panel];
  if (x <= a) return 0.0;
  const double m = integrate(gauss_legendre(16), [&](double t) { return std::exp(h_(t) - href_); }, a, x);
  return m * std::exp(href_ - log_mass_);
}

double LogConcaveInverter::cdf(double x) const {
  if (x <= edges_.front()) return 0.0;
  if (x >= edges_.back()) return 1.0;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  const std::size_t p = static_cast<std::size_t>(it - edges_.begin()) - 1;
  return std::min(1.0, cum_[p] + partial(p, x));
}

double LogConcaveInverter::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("LogConcaveInverter::quantile: u must lie in (0,1)");
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  std::size_t p = static_cast<std::size_t>(it - cum_.begin());
  p = std::clamp<std::size_t>(p, 1, cum_.size() - 1) - 1;
  double lo = edges_[p];
  double hi = edges_[p + 1];
  const double target = u - cum_[p];
  const double width = cum_[p + 1] - cum_[p];
  double x = lo + (hi - lo) * std::clamp(width > 0 ? target / width : 0.5, 0.0, 1.0);
  const double norm = std::exp(href_ - log_mass_);
  for (int it2 = 0; it2 < 60; ++it2) {
    const double f = partial(p, x) - target;
    if (f > 0)
      hi = x;
    else
      lo = x;
    const double d = std::exp(h_(x) - href_) * norm;
    double next = (d > 0.0) ? x - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double tol = 1e-15 * (std::abs(x) + (edges_.back() - edges_.front()));
    if (std::abs(next - x) <= tol || hi - lo <= tol) return next;
    x = next;
  }
  return x;
}

}  // namespace hslg
