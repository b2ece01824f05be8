#pragma once

#include <array>
#include <atomic>
#include <limits>
#include <functional>
#include <memory>
#include <vector>

#include "hslg/dist.hpp"
#include "hslg/errors.hpp"
#include "hslg/rng.hpp"

namespace hslg {

// Paths are stored 0-based: path[k-1] = S(k), k = 1..n.
using Path = std::vector<double>;

struct BridgeSpec {
  enum class Variant { Walk, Bridge, Modified };
  int n = 2;
  double a = 0.0;
  double b = 0.0;  // ignored for walks
  Variant variant = Variant::Bridge;
  int p = 0, q = 0;  // modified bridges only
  void validate() const;
};

// Random walks and bridges with increment density f_theta.
class WalkSampler {
 public:
  explicit WalkSampler(double theta);
  explicit WalkSampler(std::shared_ptr<const ConvolutionOracle> oracle);

  const ConvolutionOracle& oracle() const { return *oracle_; }
  const FTheta& increment() const { return oracle_->base(); }
  double theta() const { return oracle_->theta(); }

  Path walk(int n, double a, Rng& rng) const;
  Path bridge(int n, double a, double b, Rng& rng) const;
  Path modified_bridge(int n, int p, int q, double a, double b, Rng& rng) const;
  Path sample(const BridgeSpec& spec, Rng& rng) const;

  // Next point of a bridge sitting at x with m >= 0 steps left after it to
  // reach b: density proportional to f(v - x) f^{*m}(b - v).
  double bridge_step(double x, double b, int m, Rng& rng) const;
  // Draw v with density proportional to f^{*j}(v - a) f^{*m}(b - v), j, m >= 1.
  double bridge_point(double a, double b, int j, int m, Rng& rng) const;

  // log of f^{*(k-1)}(v-a) f^{*(n-k)}(b-v) / f^{*(n-1)}(b-a), 1 < k < n.
  double bridge_marginal_log_density(int n, int k, double a, double b, double v) const;

 private:
  double step_from_sum(double a, double b, int j, int m, Rng& rng) const;
  std::shared_ptr<const ConvolutionOracle> oracle_;
};

struct WprwSample {
  Path S1, S2;
  double x = 0.0, y = 0.0;
  double log_weight = std::numeric_limits<double>::quiet_NaN();  // log W^sc, NaN when unset
  bool truncated = false;  // generation stopped once log W^sc fell below the cutoff
  int n() const { return static_cast<int>(S1.size()); }
};

// log W^sc = -e^{S2(1)-S1(2)} - sum_{k=2}^{n-1} (e^{S2(k)-S1(k+1)} + e^{S2(k)-S1(k)}).
double wsc_log_weight(const Path& S1, const Path& S2);
inline double wsc_weight(const WprwSample& s) { return wsc_log_weight(s.S1, s.S2); }

// Paired random walks pinned at S1(n) = x, S2(n) = y with entrance factor
// g_zeta(S2(1) - S1(1)), g_zeta(u) = exp(zeta u - e^u) / Gamma(zeta).
class PrwSampler {
 public:
  PrwSampler(double theta, double zeta);
  PrwSampler(std::shared_ptr<const ConvolutionOracle> oracle, double zeta);

  const WalkSampler& walks() const { return walks_; }
  double zeta() const { return zeta_; }

  // Entrance pair (S1(1), S2(1)). The gap D = S2(1) - S1(1) has density
  // proportional to g_zeta(D) f^{*2(n-1)}(x - y + D); it is drawn by rejection
  // from g_zeta, after which S1(1) is the midpoint of a 2(n-1)-step bridge.
  std::pair<double, double> entrance(int n, double x, double y, Rng& rng) const;
  // Unnormalized log density of the entrance pair.
  double entrance_log_density(int n, double x, double y, double s1, double s2) const;

  WprwSample sample(int n, double x, double y, Rng& rng) const;  // weight unset
  // Sample with log W^sc; both bridges grow together and stop once the
  // running log-weight drops below `cutoff`.
  WprwSample weighted_sample(int n, double x, double y, Rng& rng, double cutoff = -750.0) const;

  std::uint64_t entrance_attempts() const { return attempts_; }
  std::uint64_t entrance_accepts() const { return accepts_; }

 private:
  WalkSampler walks_;
  double zeta_;
  mutable std::atomic<std::uint64_t> attempts_{0}, accepts_{0};
};

struct WprwEstimate {
  double estimate = 0.0;     // self-normalized E_WPRW[phi]
  double se = 0.0;           // delta-method standard error
  double ess = 0.0;          // (sum w)^2 / sum w^2
  double mean_weight = 0.0;  // E_PRW[W^sc]
  double se_mean_weight = 0.0;
  long samples = 0;
};

using WprwFunctional = std::function<double(const WprwSample&)>;

// Self-normalized importance sampling against PRW. Replica r uses the stream
// make_rng(seed, stream, r). Raises EstimationError when ESS < min_ess.
WprwEstimate wprw_estimate(const PrwSampler& prw, int n, double x, double y, const WprwFunctional& phi,
                           long samples, std::uint64_t seed, std::uint64_t stream, int threads = 1,
                           double min_ess = 50.0);

// NI_p on k in [from, to] (1-based): S1(k) - S2(k) >= -p. Defaults to [2, n-1].
bool ni_indicator(const Path& S1, const Path& S2, double p, int from = 2, int to = -1);

struct GapResult {
  std::array<bool, 6> sub{};
  bool all() const;
};
GapResult gap_indicator(const Path& S1, const Path& S2, double beta, int p, int q);
// exp(-e^{3/beta} - C_beta - C~_beta), the deterministic lower bound on W^sc
// on Gap_beta with |S1(1) - S2(1)| <= 1/beta.
double a_beta(double beta, int n);

// Modulus of continuity sup_{|i-j| <= window} |f(i) - f(j)|.
double modulus_of_continuity(const Path& f, int window);

struct NiScalingRow {
  int n = 0;
  long replicas = 0;
  std::array<long, 5> ni_p{};  // successes of NI_p, p = 0..4
  double prob(int p = 0) const { return static_cast<double>(ni_p[p]) / static_cast<double>(replicas); }
  double se(int p = 0) const;
};
struct NiScalingRecord {
  double a1 = 0.0, a2 = 0.0;
  std::vector<NiScalingRow> rows;
  double slope = 0.0, intercept = 0.0, slope_se = 0.0;
};

// Two independent free walks from (a1, a2); the difference walk is simulated
// directly and stopped once NI_4 has failed.
NiScalingRecord ni_scaling_campaign(double theta, double a1, double a2, const std::vector<int>& n_grid,
                                    long replicas, std::uint64_t seed, int threads = 1);

struct WscRow {
  int n = 0;
  double x = 0.0, y = 0.0;
  double mean_weight = 0.0, se = 0.0, ess = 0.0;
  long samples = 0;
};
struct WscRecord {
  std::vector<WscRow> rows;
  double slope = 0.0, intercept = 0.0, slope_se = 0.0;
};

// E_PRW[W^sc] at (x, y) = (0, -sqrt(n)) by default, log-log slope over n.
WscRecord wsc_denominator_campaign(double theta, double zeta, const std::vector<int>& n_grid, long replicas,
                                   std::uint64_t seed, int threads = 1,
                                   const std::function<std::pair<double, double>(int)>& endpoints = {});

struct ConditionedDiagnostics {
  int n = 0;
  long attempts = 0, accepted = 0;
  std::vector<double> end_gap_scaled;        // (S1(n) - S2(n)) / sqrt(n) per accepted sample
  std::vector<double> sup_gap_scaled;        // sup_k (S1 - S2) / sqrt(n)
  std::vector<double> beta_grid;
  std::vector<double> gap_frequency;         // P(Gap_beta | NI)
  std::vector<double> delta_grid;
  std::vector<double> mean_modulus_scaled;   // E[omega_delta(S1)] / sqrt(n) with window delta n
  double far_bridge_ni_frequency = 0.0;      // bridges with endpoints in R_{n,delta}
  double far_bridge_delta = 0.0;
};

// NI-conditioned statistics for walks from (a1, a2), by rejection.
ConditionedDiagnostics conditioned_diagnostics(double theta, int n, double a1, double a2, long target_accepts,
                                               const std::vector<double>& beta_grid,
                                               const std::vector<double>& delta_grid, double far_delta,
                                               long bridge_samples, std::uint64_t seed,
                                               long max_attempts = 100'000'000);

}  // namespace hslg
