#pragma once

#include <functional>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "hslg/dist.hpp"
#include "hslg/errors.hpp"
#include "hslg/rng.hpp"
#include "hslg/walks.hpp"

namespace hslg {

enum class EdgeColor { Blue, Black, Red };

struct Vertex {
  int i = 1, j = 1;
  friend bool operator==(const Vertex&, const Vertex&) = default;
  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

// Node ids: v >= 0 is a site of the domain, v < 0 is boundary vertex ~v.
struct GibbsEdge {
  int src = 0, tgt = 0;
  EdgeColor color = EdgeColor::Blue;
  double param = 0.0;  // theta for blue edges
};

// Bounded domain of the colored graph on Z_{>=1}^2:
//   blue  (i,j) -> (i,j+1) for odd j, (i,j+1) -> (i,j) for even j
//   black (i+1,2j) -> (i,2j-1) and (i+1,2j) -> (i,2j+1)
//   red   (2i-1,1) -> (2i,1)
// Only edges with at least one endpoint in the domain are kept; their other
// endpoints form the boundary.
class ColoredDomain {
 public:
  using BlueParam = std::function<double(int i, int j)>;  // theta on the blue edge {(i,j),(i,j+1)}

  ColoredDomain() = default;
  ColoredDomain(std::vector<Vertex> sites, const BlueParam& blue);

  // K_{k,T}: rows 1..k, row 1 has j <= 2T-2, rows >= 2 have j <= 2T-1.
  static ColoredDomain K(int k, int T, double theta);
  // K'_{k,T} = [1,k] x [1,2T-2].
  static ColoredDomain Kprime(int k, int T, double theta);
  // Lambda*_N = {i <= N-1, j <= 2N-2i+1}.
  static ColoredDomain LambdaStar(int N, double theta);

  std::size_t size() const { return sites_.size(); }
  const std::vector<Vertex>& sites() const { return sites_; }
  const std::vector<Vertex>& boundary() const { return boundary_; }
  const std::vector<GibbsEdge>& edges() const { return edges_; }
  const std::vector<int>& incident(int v) const { return incident_[static_cast<std::size_t>(v)]; }
  int site_index(int i, int j) const;      // -1 if absent
  int boundary_index(int i, int j) const;  // -1 if absent
  int max_row() const;

 private:
  std::vector<Vertex> sites_, boundary_;
  std::vector<GibbsEdge> edges_;
  std::vector<std::vector<int>> incident_;
  std::map<Vertex, int> site_idx_, bnd_idx_;
};

using GibbsState = std::vector<double>;  // aligned with domain.sites()

struct GibbsSpec {
  std::shared_ptr<const ColoredDomain> domain;
  std::vector<double> boundary_values;  // aligned with domain->boundary(); +-inf allowed
  double alpha = 0.0;

  GibbsSpec() = default;
  GibbsSpec(std::shared_ptr<const ColoredDomain> d, double alpha, const std::function<double(int, int)>& boundary_value);
  double node_value(int node, const GibbsState& s) const {
    return node >= 0 ? s[static_cast<std::size_t>(node)] : boundary_values[static_cast<std::size_t>(~node)];
  }
};

// K_{k,T} with y_1 at (1,2T-1), y_i at (i,2T) for i >= 2, z_j at (k+1,2j),
// j = 1..T, and 0 at the red partner (k+1,1) of an odd bottom row (its value
// only shifts the density by a constant).
GibbsSpec make_K_spec(int k, int T, double theta, double alpha, const std::vector<double>& y,
                      const std::vector<double>& z);

// Unnormalized log density: sum over edges of log W_e(u_src - u_tgt). Edge
// factors that tend to 1 under a -inf (or +inf) boundary value are dropped;
// red edges keep only their finite endpoint.
double log_density(const GibbsSpec& spec, const GibbsState& state);

// Law of u_v given every other value: exp(A x - C e^x - D e^{-x}).
LogGig site_conditional(const GibbsSpec& spec, const GibbsState& state, int v);

enum class Scan { Forward, Reverse };
void heat_bath_sweep(const GibbsSpec& spec, GibbsState& state, Rng& rng, Scan scan = Scan::Forward);

// Metropolis move shifting every site in `block` by delta (symmetric proposal);
// returns whether it was accepted.
bool block_shift_move(const GibbsSpec& spec, GibbsState& state, const std::vector<int>& block, double delta, Rng& rng);

// A heat-bath sweep followed by `moves` prefix shifts: all rows, or a single
// row, over columns j <= l with l uniform, delta ~ N(0, (scale sqrt(l))^2).
// Long-wavelength modes of the chain mix much faster this way.
struct MixingStats {
  long proposed = 0, accepted = 0;
};
void mixing_sweep(const GibbsSpec& spec, GibbsState& state, Rng& rng, int moves, double scale, MixingStats* stats = nullptr);

// Several chains driven by the same uniforms through the monotone inverse
// conditional CDF. Specs must share a domain and be ordered pointwise in their
// boundary values (ascending); order of the states is asserted after each
// sweep.
class MonotoneCoupledChains {
 public:
  MonotoneCoupledChains(std::vector<GibbsSpec> specs, std::vector<GibbsState> init);
  void sweep(Rng& rng);
  const std::vector<GibbsState>& states() const { return states_; }
  long sweeps() const { return sweeps_; }
  long comparisons() const { return comparisons_; }
  double max_order_excess() const { return max_excess_; }  // max over sweeps of u_v(c) - u_v(c+1)

 private:
  std::vector<GibbsSpec> specs_;
  std::vector<GibbsState> states_;
  long sweeps_ = 0, comparisons_ = 0;
  double max_excess_ = -std::numeric_limits<double>::infinity();
};

enum class BottomFreeRoute { Auto, Exact, Critical, Supercritical };

struct BottomFreeSample {
  int k = 1, T = 2;
  // curves[0] = L_1(1..2T-1), curves[1] = L_2(1..2T); the last entry is the pin y_i.
  std::vector<std::vector<double>> curves;
  double log_weight = 0.0;  // importance weight against the target law (0 when exact)
  bool truncated = false;
  BottomFreeRoute route = BottomFreeRoute::Exact;
  double at(int i, int j) const { return curves[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]; }
};

class BottomFreeSampler {
 public:
  BottomFreeSampler(double theta, double alpha);
  BottomFreeSampler(std::shared_ptr<const ConvolutionOracle> oracle, double alpha);
  double theta() const { return theta_; }
  double alpha() const { return alpha_; }
  BottomFreeRoute resolve(int k, BottomFreeRoute route) const;
  BottomFreeSample sample(int k, int T, const std::vector<double>& y, Rng& rng,
                          BottomFreeRoute route = BottomFreeRoute::Auto) const;
  const PrwSampler* prw() const { return prw_.get(); }

 private:
  std::shared_ptr<const ConvolutionOracle> oracle_;
  double theta_, alpha_;
  std::unique_ptr<PrwSampler> prw_;
};

struct McEstimate {
  double estimate = 0.0, se = 0.0, ess = 0.0;
  long samples = 0;
};

// V_k^T(y, z) = E_bottom-free[prod_{j=1}^T W(z_j; L_k(2j+1), L_k(2j-1))] with
// L_k(2T+1) = +inf; z_j sits at (k+1, 2j).
McEstimate v_normalizer_estimate(const BottomFreeSampler& sampler, const std::vector<double>& y,
                                 const std::vector<double>& z, int k, int T, long samples, std::uint64_t seed,
                                 std::uint64_t stream = 0x564Eu, BottomFreeRoute route = BottomFreeRoute::Auto);

// Middle odd points L_1(2j+1), T1 <= j <= T2-2, of the top curve given
// L_1(2T1-1) = a, L_1(2T2-1) = b and the row below (z_j at (2,2j)): a bridge
// with f_theta increments reweighted by
// W~ = exp(-sum_{j=T1}^{T2-1} (e^{z_j - X(j)} + e^{z_j - X(j-1)})).
struct TwoSidedSamples {
  int T1 = 0, T2 = 0;
  std::vector<Path> paths;  // paths[s][j - T1] = X(j)
  std::vector<double> log_weights;
  double ess = 0.0;
  double weighted_mean(const std::function<double(const Path&)>& fn) const;
  const Path& resample(Rng& rng) const;  // one path drawn by weight
};
// z is indexed by j: z[j-1] = z_j, size >= T2 - 1.
TwoSidedSamples two_sided_conditional_sample(const WalkSampler& walks, const std::vector<double>& z, double a, double b,
                                             int T1, int T2, long samples, std::uint64_t seed,
                                             std::uint64_t stream = 0x5453u, double min_ess = 50.0);

}  // namespace hslg
