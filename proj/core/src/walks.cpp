#include "hslg/walks.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "hslg/parallel.hpp"
#include "hslg/stats.hpp"

namespace hslg {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double exp_or_inf(double x) { return x > 709.0 ? std::numeric_limits<double>::infinity() : std::exp(x); }

}  // namespace

void BridgeSpec::validate() const {
  if (n < 1) throw DomainError("BridgeSpec: n must be positive");
  if (variant == Variant::Bridge && n < 2) throw DomainError("BridgeSpec: a bridge needs n >= 2");
  if (variant == Variant::Modified) {
    if (p < 1 || q < 0 || p + q > n) throw DomainError("BridgeSpec: modified bridge needs p >= 1, q >= 0, p + q <= n");
    if (q > 0 && p + q == n) throw DomainError("BridgeSpec: p + q = n with q > 0 pins S(p) twice");
  }
}

WalkSampler::WalkSampler(double theta) : oracle_(std::make_shared<ConvolutionOracle>(theta)) {}
WalkSampler::WalkSampler(std::shared_ptr<const ConvolutionOracle> oracle) : oracle_(std::move(oracle)) {
  if (!oracle_) throw DomainError("WalkSampler: null oracle");
}

Path WalkSampler::walk(int n, double a, Rng& rng) const {
  if (n < 1) throw DomainError("walk: n must be positive");
  Path s(static_cast<std::size_t>(n));
  s[0] = a;
  for (int k = 1; k < n; ++k) s[k] = s[k - 1] + increment().sample(rng);
  return s;
}

double WalkSampler::bridge_step(double x, double b, int m, Rng& rng) const {
  if (m < 0) throw DomainError("bridge_step: m must be non-negative");
  if (m == 0) return b;
  return step_from_sum(x, b, 1, m, rng);
}

double WalkSampler::bridge_point(double a, double b, int j, int m, Rng& rng) const {
  if (j < 1 || m < 1) throw DomainError("bridge_point: need j, m >= 1");
  return step_from_sum(a, b, j, m, rng);
}

// Target for d = v - a: f^{*j}(d) f^{*m}(Y - d), Y = b - a. Proposal: a sum of j
// increments tilted by e^{lambda d}; the leftover factor
// g(d) = log f^{*m}(Y - d) - lambda d is concave, so e^{g(d) - max g} is a
// valid acceptance probability. lambda is chosen to put the maximum of g at
// d = 0 when that tilt is admissible.
double WalkSampler::step_from_sum(double a, double b, int j, int m, Rng& rng) const {
  const ConvolutionOracle& orc = *oracle_;
  const FTheta& f = increment();
  const double th = f.theta();
  const double Y = b - a;
  double lambda = -orc.eval(m, Y).dlog;
  double dstar = 0.0;
  const double cap = 0.95 * th;
  if (std::abs(lambda) > cap) {
    lambda = std::copysign(cap, lambda);
    // Solve l'(Y - d) = -lambda; l' is decreasing.
    auto resid = [&](double d) { return orc.eval(m, Y - d).dlog + lambda; };  // increasing in d
    double lo = 0.0, hi = 0.0, step = 1.0;
    if (resid(0.0) < 0.0) {
      hi = step;
      while (resid(hi) < 0.0) hi += (step *= 2.0);
    } else {
      lo = -step;
      while (resid(lo) > 0.0) lo -= (step *= 2.0);
    }
    for (int it = 0; it < 80 && hi - lo > 1e-10 * (1.0 + std::abs(lo)); ++it) {
      const double mid = 0.5 * (lo + hi);
      (resid(mid) < 0.0 ? lo : hi) = mid;
    }
    dstar = 0.5 * (lo + hi);
  }
  const double g0 = orc.eval(m, Y - dstar).log_value - lambda * dstar;
  for (int it = 0; it < 1'000'000; ++it) {
    double d = 0.0;
    for (int t = 0; t < j; ++t) d += f.sample_tilted(lambda, rng);
    const double g = orc.eval(m, Y - d).log_value - lambda * d;
    if (std::log(uniform01(rng)) < g - g0) return a + d;
  }
  throw NumericalError("bridge step: rejection sampler failed to accept");
}

Path WalkSampler::bridge(int n, double a, double b, Rng& rng) const {
  if (n < 2) throw DomainError("bridge: n must be >= 2");
  Path s(static_cast<std::size_t>(n));
  s[0] = a;
  for (int idx = 1; idx < n - 1; ++idx) s[idx] = bridge_step(s[idx - 1], b, n - 1 - idx, rng);
  s[n - 1] = b;
  return s;
}

Path WalkSampler::modified_bridge(int n, int p, int q, double a, double b, Rng& rng) const {
  BridgeSpec spec{n, a, b, BridgeSpec::Variant::Modified, p, q};
  spec.validate();
  if (p == n) return walk(n, a, rng);
  Path s(static_cast<std::size_t>(n));
  s[0] = a;
  for (int k = 2; k <= p; ++k) s[k - 1] = s[k - 2] + increment().sample(rng);
  s[n - 1] = b;
  for (int k = 1; k <= q; ++k) s[n - k - 1] = s[n - k] - increment().sample(rng);
  const int lo = p - 1, hi = n - q - 1;  // 0-based ends of the connecting bridge
  for (int idx = lo + 1; idx < hi; ++idx) s[idx] = bridge_step(s[idx - 1], s[hi], hi - idx, rng);
  return s;
}

Path WalkSampler::sample(const BridgeSpec& spec, Rng& rng) const {
  spec.validate();
  switch (spec.variant) {
    case BridgeSpec::Variant::Walk:
      return walk(spec.n, spec.a, rng);
    case BridgeSpec::Variant::Bridge:
      return bridge(spec.n, spec.a, spec.b, rng);
    case BridgeSpec::Variant::Modified:
      return modified_bridge(spec.n, spec.p, spec.q, spec.a, spec.b, rng);
  }
  throw DomainError("BridgeSpec: unknown variant");
}

double WalkSampler::bridge_marginal_log_density(int n, int k, double a, double b, double v) const {
  if (k <= 1 || k >= n) throw DomainError("bridge marginal: need 1 < k < n");
  return oracle_->log_density(k - 1, v - a) + oracle_->log_density(n - k, b - v) - oracle_->log_density(n - 1, b - a);
}

double wsc_log_weight(const Path& S1, const Path& S2) {
  const std::size_t n = S1.size();
  if (n < 2 || S2.size() != n) throw DomainError("wsc_log_weight: paths must share a length >= 2");
  double s = exp_or_inf(S2[0] - S1[1]);
  for (std::size_t k = 1; k + 1 < n; ++k) s += exp_or_inf(S2[k] - S1[k + 1]) + exp_or_inf(S2[k] - S1[k]);
  return -s;
}

PrwSampler::PrwSampler(double theta, double zeta) : PrwSampler(std::make_shared<ConvolutionOracle>(theta), zeta) {}

PrwSampler::PrwSampler(std::shared_ptr<const ConvolutionOracle> oracle, double zeta)
    : walks_(std::move(oracle)), zeta_(zeta) {
  if (!(zeta > 0.0)) throw DomainError("PrwSampler: zeta must be positive");
}

std::pair<double, double> PrwSampler::entrance(int n, double x, double y, Rng& rng) const {
  if (n < 2) throw DomainError("PRW: n must be >= 2");
  const int m = n - 1;
  const ConvolutionOracle& orc = walks_.oracle();
  const double l0 = orc.eval(2 * m, 0.0).log_value;
  constexpr long kMaxAttempts = 100'000;
  for (long it = 0; it < kMaxAttempts; ++it) {
    attempts_.fetch_add(1, std::memory_order_relaxed);
    const double D = log_gamma_variate(zeta_, rng);
    const double la = orc.eval(2 * m, x - y + D).log_value - l0;
    if (std::log(uniform01(rng)) < la) {
      accepts_.fetch_add(1, std::memory_order_relaxed);
      const double s1 = walks_.bridge_point(y - D, x, m, m, rng);
      return {s1, s1 + D};
    }
  }
  throw EstimationError("PRW entrance: rejection acceptance below 1e-4");
}

double PrwSampler::entrance_log_density(int n, double x, double y, double s1, double s2) const {
  const int m = n - 1;
  const double d = s2 - s1;
  const double lg = zeta_ * d - std::exp(d) - std::lgamma(zeta_);
  return lg + walks_.oracle().log_density(m, x - s1) + walks_.oracle().log_density(m, y - s2);
}

WprwSample PrwSampler::sample(int n, double x, double y, Rng& rng) const {
  WprwSample s;
  s.x = x;
  s.y = y;
  const auto [s1, s2] = entrance(n, x, y, rng);
  s.S1 = walks_.bridge(n, s1, x, rng);
  s.S2 = walks_.bridge(n, s2, y, rng);
  return s;
}

WprwSample PrwSampler::weighted_sample(int n, double x, double y, Rng& rng, double cutoff) const {
  WprwSample s;
  s.x = x;
  s.y = y;
  const auto [s1, s2] = entrance(n, x, y, rng);
  const std::size_t N = static_cast<std::size_t>(n);
  s.S1.assign(N, std::numeric_limits<double>::quiet_NaN());
  s.S2.assign(N, std::numeric_limits<double>::quiet_NaN());
  s.S1[0] = s1;
  s.S2[0] = s2;
  s.S1[N - 1] = x;
  s.S2[N - 1] = y;
  if (n > 2) s.S1[1] = walks_.bridge_step(s1, x, n - 2, rng);
  double lw = -exp_or_inf(s.S2[0] - s.S1[1]);
  for (int k = 2; k <= n - 1 && lw >= cutoff; ++k) {
    // S1(k+1) at index k, S2(k) at index k-1
    if (k < n - 1) s.S1[k] = walks_.bridge_step(s.S1[k - 1], x, n - 1 - k, rng);
    s.S2[k - 1] = walks_.bridge_step(s.S2[k - 2], y, n - k, rng);
    lw -= exp_or_inf(s.S2[k - 1] - s.S1[k]) + exp_or_inf(s.S2[k - 1] - s.S1[k - 1]);
  }
  if (lw < cutoff) {
    s.truncated = true;
    s.log_weight = kNegInf;
  } else {
    s.log_weight = lw;
  }
  return s;
}

WprwEstimate wprw_estimate(const PrwSampler& prw, int n, double x, double y, const WprwFunctional& phi, long samples,
                           std::uint64_t seed, std::uint64_t stream, int threads, double min_ess) {
  if (samples < 1) throw DomainError("wprw_estimate: need samples >= 1");
  std::vector<double> lw(static_cast<std::size_t>(samples)), val(static_cast<std::size_t>(samples), 0.0);
  parallel_for(static_cast<std::size_t>(samples), threads, [&](std::size_t r) {
    Rng rng = make_rng(seed, stream, r);
    const WprwSample s = prw.weighted_sample(n, x, y, rng);
    lw[r] = s.log_weight;
    if (!s.truncated) val[r] = phi(s);
  });
  double sw = 0, sw2 = 0, swf = 0;
  for (std::size_t r = 0; r < lw.size(); ++r) {
    const double w = std::exp(lw[r]);
    sw += w;
    sw2 += w * w;
    swf += w * val[r];
  }
  WprwEstimate e;
  e.samples = samples;
  const double N = static_cast<double>(samples);
  e.mean_weight = sw / N;
  e.se_mean_weight = samples > 1 ? std::sqrt(std::max(0.0, (sw2 / N - e.mean_weight * e.mean_weight) / (N - 1))) : 0.0;
  e.ess = sw > 0 ? sw * sw / sw2 : 0.0;
  if (!(e.ess >= min_ess)) throw EstimationError("wprw_estimate: effective sample size below threshold; raise the sample count");
  e.estimate = swf / sw;
  double s2 = 0;
  for (std::size_t r = 0; r < lw.size(); ++r) {
    const double w = std::exp(lw[r]);
    s2 += w * w * (val[r] - e.estimate) * (val[r] - e.estimate);
  }
  e.se = std::sqrt(s2) / sw;
  return e;
}

bool ni_indicator(const Path& S1, const Path& S2, double p, int from, int to) {
  const int n = static_cast<int>(S1.size());
  if (to < 0) to = n - 1;
  if (S2.size() != S1.size() || from < 1 || to > n) throw DomainError("ni_indicator: range outside the paths");
  for (int k = from; k <= to; ++k)
    if (S1[k - 1] - S2[k - 1] < -p) return false;
  return true;
}

bool GapResult::all() const { return std::all_of(sub.begin(), sub.end(), [](bool b) { return b; }); }

GapResult gap_indicator(const Path& S1, const Path& S2, double beta, int p, int q) {
  const int n = static_cast<int>(S1.size());
  if (S2.size() != S1.size()) throw DomainError("gap_indicator: length mismatch");
  if (p < 1 || q < 1 || p + q > n - 1) throw DomainError("gap_indicator: need p, q >= 1 and p + q <= n - 1");
  if (!(beta > 0.0)) throw DomainError("gap_indicator: beta must be positive");
  auto S = [&](int k) { return S1[k - 1]; };
  auto gap = [&](int k) { return S1[k - 1] - S2[k - 1]; };
  const double ib = 1.0 / beta;
  const double n4 = std::pow(n, 0.25), ln = std::log(static_cast<double>(n));
  GapResult g;
  g.sub.fill(true);
  for (int k = 2; k <= p; ++k) {
    if (gap(k) < beta * std::pow(k, 0.25)) g.sub[0] = false;
    if (S(k - 1) - S(k) > ib * std::pow(k, 0.125)) g.sub[3] = false;
  }
  for (int k = n - q; k <= n - 1; ++k)
    if (gap(k) < beta * std::pow(n - k, 0.25)) g.sub[1] = false;
  for (int k = p + 1; k <= n - q; ++k) {
    if (gap(k) < n4) g.sub[2] = false;
    if (std::abs(S(k) - S(k - 1)) > ib * ln) g.sub[5] = false;
  }
  for (int k = n - q + 1; k <= n; ++k)
    if (S(k - 1) - S(k) > ib * std::pow(n - k + 1, 0.125)) g.sub[4] = false;
  return g;
}

double a_beta(double beta, int n) {
  if (!(beta > 0.0) || n < 2) throw DomainError("a_beta: need beta > 0 and n >= 2");
  const double ib = 1.0 / beta;
  const double n4 = std::pow(n, 0.25), ln = std::log(static_cast<double>(n));
  double C = 0.0, Ct = 0.0;
  for (int k = 1; k <= n - 1; ++k) {
    const double tau = -std::min({beta * std::pow(k, 0.25), beta * std::pow(n - k, 0.25), n4});
    C += std::exp(tau);
    Ct += exp_or_inf(tau + ib * std::max({std::pow(k + 1, 0.125), std::pow(n - k, 0.125), ln}));
  }
  return std::exp(-exp_or_inf(3.0 * ib) - C - Ct);
}

double modulus_of_continuity(const Path& f, int window) {
  if (window < 1 || f.empty()) return 0.0;
  std::deque<std::size_t> mx, mn;
  double best = 0.0;
  const std::size_t w = static_cast<std::size_t>(window);
  for (std::size_t i = 0; i < f.size(); ++i) {
    while (!mx.empty() && f[mx.back()] <= f[i]) mx.pop_back();
    while (!mn.empty() && f[mn.back()] >= f[i]) mn.pop_back();
    mx.push_back(i);
    mn.push_back(i);
    while (mx.front() + w < i) mx.pop_front();
    while (mn.front() + w < i) mn.pop_front();
    best = std::max(best, f[mx.front()] - f[mn.front()]);
  }
  return best;
}

double NiScalingRow::se(int p) const {
  const double pr = prob(p);
  return std::sqrt(pr * (1.0 - pr) / static_cast<double>(replicas));
}

NiScalingRecord ni_scaling_campaign(double theta, double a1, double a2, const std::vector<int>& n_grid, long replicas,
                                    std::uint64_t seed, int threads) {
  if (replicas < 1 || n_grid.empty()) throw DomainError("ni_scaling_campaign: empty design");
  const FTheta f(theta);
  NiScalingRecord rec;
  rec.a1 = a1;
  rec.a2 = a2;
  std::vector<double> lx, ly;
  for (int n : n_grid) {
    if (n < 32) throw DomainError("ni_scaling_campaign: n must be >= 32");
    std::vector<unsigned char> mask(static_cast<std::size_t>(replicas));
    parallel_for(mask.size(), threads, [&](std::size_t r) {
      Rng rng = make_rng(seed, (0x4E49ull << 32) | static_cast<std::uint64_t>(n), r);
      double u = a1 - a2, mn = std::numeric_limits<double>::infinity();
      for (int k = 2; k <= n - 1; ++k) {
        u += f.sample(rng) - f.sample(rng);
        mn = std::min(mn, u);
        if (mn < -4.0) break;
      }
      unsigned char bits = 0;
      for (int p = 0; p <= 4; ++p)
        if (mn >= -p) bits |= static_cast<unsigned char>(1u << p);
      mask[r] = bits;
    });
    NiScalingRow row;
    row.n = n;
    row.replicas = replicas;
    for (unsigned char b : mask)
      for (int p = 0; p <= 4; ++p) row.ni_p[p] += (b >> p) & 1u;
    if (row.ni_p[0] == 0) throw EstimationError("ni_scaling_campaign: zero NI successes; widen replicas");
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(row.prob(0)));
    rec.rows.push_back(row);
  }
  if (lx.size() >= 2) {
    const LinearFit fit = ols(lx, ly);
    rec.slope = fit.slope;
    rec.intercept = fit.intercept;
    rec.slope_se = fit.slope_se;
  }
  return rec;
}

WscRecord wsc_denominator_campaign(double theta, double zeta, const std::vector<int>& n_grid, long replicas,
                                   std::uint64_t seed, int threads,
                                   const std::function<std::pair<double, double>(int)>& endpoints) {
  const PrwSampler prw(theta, zeta);
  WscRecord rec;
  std::vector<double> lx, ly;
  if (replicas < 1 || n_grid.empty()) throw DomainError("wsc_denominator_campaign: empty design");
  for (int n : n_grid) {
    if (n < 32) throw DomainError("wsc_denominator_campaign: n must be >= 32");
    const auto [x, y] = endpoints ? endpoints(n) : std::pair<double, double>{0.0, -std::sqrt(static_cast<double>(n))};
    const WprwEstimate e = wprw_estimate(prw, n, x, y, [](const WprwSample&) { return 1.0; }, replicas, seed,
                                         (0x5753ull << 32) | static_cast<std::uint64_t>(n), threads);
    WscRow row{n, x, y, e.mean_weight, e.se_mean_weight, e.ess, replicas};
    rec.rows.push_back(row);
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(e.mean_weight));
  }
  if (lx.size() >= 2) {
    const LinearFit fit = ols(lx, ly);
    rec.slope = fit.slope;
    rec.intercept = fit.intercept;
    rec.slope_se = fit.slope_se;
  }
  return rec;
}

ConditionedDiagnostics conditioned_diagnostics(double theta, int n, double a1, double a2, long target_accepts,
                                               const std::vector<double>& beta_grid,
                                               const std::vector<double>& delta_grid, double far_delta,
                                               long bridge_samples, std::uint64_t seed, long max_attempts) {
  if (n < 8) throw DomainError("conditioned_diagnostics: n must be >= 8");
  const WalkSampler ws(theta);
  const FTheta& f = ws.increment();
  ConditionedDiagnostics d;
  d.n = n;
  d.beta_grid = beta_grid;
  d.delta_grid = delta_grid;
  d.far_bridge_delta = far_delta;
  std::vector<long> gap_hits(beta_grid.size(), 0);
  std::vector<double> mod_sum(delta_grid.size(), 0.0);
  const double rn = std::sqrt(static_cast<double>(n));
  const int pq = n / 4;
  Rng rng = make_rng(seed, 0x434Eull << 32 | static_cast<std::uint64_t>(n), 0);
  Path S1(static_cast<std::size_t>(n)), S2(static_cast<std::size_t>(n));
  while (d.accepted < target_accepts) {
    if (++d.attempts > max_attempts) throw EstimationError("conditioned_diagnostics: NI acceptance too low");
    S1[0] = a1;
    S2[0] = a2;
    bool ok = true;
    for (int k = 2; k <= n && ok; ++k) {
      S1[k - 1] = S1[k - 2] + f.sample(rng);
      S2[k - 1] = S2[k - 2] + f.sample(rng);
      if (k <= n - 1 && S1[k - 1] < S2[k - 1]) ok = false;
    }
    if (!ok) continue;
    ++d.accepted;
    d.end_gap_scaled.push_back((S1[n - 1] - S2[n - 1]) / rn);
    double sup = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) sup = std::max(sup, S1[k] - S2[k]);
    d.sup_gap_scaled.push_back(sup / rn);
    for (std::size_t b = 0; b < beta_grid.size(); ++b)
      if (gap_indicator(S1, S2, beta_grid[b], pq, pq).all()) ++gap_hits[b];
    for (std::size_t j = 0; j < delta_grid.size(); ++j)
      mod_sum[j] += modulus_of_continuity(S1, std::max(1, static_cast<int>(delta_grid[j] * n))) / rn;
  }
  for (std::size_t b = 0; b < beta_grid.size(); ++b)
    d.gap_frequency.push_back(static_cast<double>(gap_hits[b]) / static_cast<double>(d.accepted));
  for (std::size_t j = 0; j < delta_grid.size(); ++j)
    d.mean_modulus_scaled.push_back(mod_sum[j] / static_cast<double>(d.accepted));
  if (bridge_samples > 0) {
    long hits = 0;
    const double sep = far_delta * rn;
    for (long r = 0; r < bridge_samples; ++r) {
      Rng br = make_rng(seed, 0x4642ull << 32 | static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r));
      const Path B1 = ws.bridge(n, sep, sep, br);
      const Path B2 = ws.bridge(n, 0.0, 0.0, br);
      double mn = std::numeric_limits<double>::infinity();
      for (int k = 0; k < n; ++k) mn = std::min(mn, B1[k] - B2[k]);
      if (mn >= 0.25 * sep) ++hits;
    }
    d.far_bridge_ni_frequency = static_cast<double>(hits) / static_cast<double>(bridge_samples);
  }
  return d;
}

}  // namespace hslg
