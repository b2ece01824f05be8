#include "hslg/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <tuple>

namespace hslg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lse(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  return std::max(a, b) + std::log1p(std::exp(-std::abs(a - b)));
}

double normal01(Rng& rng) {
  const double u1 = uniform01(rng), u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// log W_e(a - b) for edge e with endpoint values a (source) and b (target).
double edge_log_weight(const GibbsEdge& e, double a, double b, double alpha) {
  switch (e.color) {
    case EdgeColor::Blue: {
      if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("blue edge with an infinite endpoint");
      const double x = a - b;
      return e.param * x - std::exp(x);
    }
    case EdgeColor::Black: {
      if (a == -kInf || b == kInf) return 0.0;
      if (a == kInf || b == -kInf) return -kInf;
      return -std::exp(a - b);
    }
    case EdgeColor::Red:
      return -alpha * (std::isfinite(a) ? a : 0.0) + alpha * (std::isfinite(b) ? b : 0.0);
  }
  return 0.0;
}

}  // namespace

ColoredDomain::ColoredDomain(std::vector<Vertex> sites, const BlueParam& blue) : sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
  for (std::size_t k = 0; k < sites_.size(); ++k) {
    if (sites_[k].i < 1 || sites_[k].j < 1) throw DomainError("ColoredDomain: vertices must lie in Z_{>=1}^2");
    site_idx_[sites_[k]] = static_cast<int>(k);
  }
  incident_.resize(sites_.size());
  std::set<std::tuple<Vertex, Vertex, int>> seen;
  auto node = [&](Vertex v) -> int {
    if (auto it = site_idx_.find(v); it != site_idx_.end()) return it->second;
    auto [it, fresh] = bnd_idx_.emplace(v, static_cast<int>(boundary_.size()));
    if (fresh) boundary_.push_back(v);
    return ~it->second;
  };
  auto add = [&](Vertex s, Vertex t, EdgeColor c, double param) {
    if (!seen.emplace(s, t, static_cast<int>(c)).second) return;
    GibbsEdge e{node(s), node(t), c, param};
    if (c == EdgeColor::Blue && !(param > 0.0)) throw DomainError("ColoredDomain: blue edges need a positive parameter");
    const int id = static_cast<int>(edges_.size());
    edges_.push_back(e);
    if (e.src >= 0) incident_[static_cast<std::size_t>(e.src)].push_back(id);
    if (e.tgt >= 0) incident_[static_cast<std::size_t>(e.tgt)].push_back(id);
  };
  auto blue_edge = [&](int i, int j) {  // edge between (i,j) and (i,j+1)
    const Vertex l{i, j}, r{i, j + 1};
    if (j % 2 == 1)
      add(l, r, EdgeColor::Blue, blue(i, j));
    else
      add(r, l, EdgeColor::Blue, blue(i, j));
  };
  const std::vector<Vertex> own = sites_;
  for (const Vertex& v : own) {
    const int i = v.i, j = v.j;
    blue_edge(i, j);
    if (j >= 2) blue_edge(i, j - 1);
    if (j % 2 == 0) {
      if (i >= 2) {
        add(v, {i - 1, j - 1}, EdgeColor::Black, 0.0);
        add(v, {i - 1, j + 1}, EdgeColor::Black, 0.0);
      }
    } else {
      if (j >= 3) add({i + 1, j - 1}, v, EdgeColor::Black, 0.0);
      add({i + 1, j + 1}, v, EdgeColor::Black, 0.0);
    }
    if (j == 1) {
      if (i % 2 == 1)
        add(v, {i + 1, 1}, EdgeColor::Red, 0.0);
      else
        add({i - 1, 1}, v, EdgeColor::Red, 0.0);
    }
  }
}

ColoredDomain ColoredDomain::K(int k, int T, double theta) {
  if (k < 1 || T < 2) throw DomainError("K_{k,T}: need k >= 1, T >= 2");
  std::vector<Vertex> s;
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= 2 * T - 1 - (i == 1 ? 1 : 0); ++j) s.push_back({i, j});
  return ColoredDomain(std::move(s), [theta](int, int) { return theta; });
}

ColoredDomain ColoredDomain::Kprime(int k, int T, double theta) {
  if (k < 1 || T < 2) throw DomainError("K'_{k,T}: need k >= 1, T >= 2");
  std::vector<Vertex> s;
  for (int i = 1; i <= k; ++i)
    for (int j = 1; j <= 2 * T - 2; ++j) s.push_back({i, j});
  return ColoredDomain(std::move(s), [theta](int, int) { return theta; });
}

ColoredDomain ColoredDomain::LambdaStar(int N, double theta) {
  if (N < 2) throw DomainError("Lambda*_N: need N >= 2");
  std::vector<Vertex> s;
  for (int i = 1; i <= N - 1; ++i)
    for (int j = 1; j <= 2 * N - 2 * i + 1; ++j) s.push_back({i, j});
  return ColoredDomain(std::move(s), [theta](int, int) { return theta; });
}

int ColoredDomain::site_index(int i, int j) const {
  auto it = site_idx_.find({i, j});
  return it == site_idx_.end() ? -1 : it->second;
}

int ColoredDomain::boundary_index(int i, int j) const {
  auto it = bnd_idx_.find({i, j});
  return it == bnd_idx_.end() ? -1 : it->second;
}

int ColoredDomain::max_row() const {
  int r = 0;
  for (const auto& v : sites_) r = std::max(r, v.i);
  return r;
}

GibbsSpec::GibbsSpec(std::shared_ptr<const ColoredDomain> d, double a, const std::function<double(int, int)>& bv)
    : domain(std::move(d)), alpha(a) {
  if (!domain) throw DomainError("GibbsSpec: null domain");
  for (const Vertex& v : domain->boundary()) boundary_values.push_back(bv(v.i, v.j));
}

GibbsSpec make_K_spec(int k, int T, double theta, double alpha, const std::vector<double>& y,
                      const std::vector<double>& z) {
  if (static_cast<int>(y.size()) != k || static_cast<int>(z.size()) != T)
    throw DomainError("make_K_spec: need |y| = k and |z| = T");
  auto dom = std::make_shared<const ColoredDomain>(ColoredDomain::K(k, T, theta));
  return GibbsSpec(dom, alpha, [&](int i, int j) -> double {
    if (i == 1 && j == 2 * T - 1) return y[0];
    if (i >= 2 && i <= k && j == 2 * T) return y[static_cast<std::size_t>(i - 1)];
    if (i == k + 1 && j % 2 == 0 && j / 2 >= 1 && j / 2 <= T) return z[static_cast<std::size_t>(j / 2 - 1)];
    if (i == k + 1 && j == 1) return 0.0;
    throw DomainError("make_K_spec: unexpected boundary vertex");
  });
}

double log_density(const GibbsSpec& spec, const GibbsState& state) {
  if (state.size() != spec.domain->size()) throw DomainError("log_density: state does not match the domain");
  double s = 0.0;
  for (const GibbsEdge& e : spec.domain->edges())
    s += edge_log_weight(e, spec.node_value(e.src, state), spec.node_value(e.tgt, state), spec.alpha);
  return s;
}

LogGig site_conditional(const GibbsSpec& spec, const GibbsState& state, int v) {
  if (v < 0 || static_cast<std::size_t>(v) >= spec.domain->size()) throw DomainError("site_conditional: vertex not in domain");
  double A = 0.0, logC = -kInf, logD = -kInf;
  for (int id : spec.domain->incident(v)) {
    const GibbsEdge& e = spec.domain->edges()[static_cast<std::size_t>(id)];
    const bool is_src = e.src == v;
    const double w = spec.node_value(is_src ? e.tgt : e.src, state);
    switch (e.color) {
      case EdgeColor::Blue:
        if (!std::isfinite(w)) throw DomainError("site_conditional: blue neighbour is infinite");
        if (is_src) {
          A += e.param;
          logC = lse(logC, -w);
        } else {
          A -= e.param;
          logD = lse(logD, w);
        }
        break;
      case EdgeColor::Black:
        if (is_src) {
          if (w == -kInf) throw DomainError("site_conditional: black target at -inf");
          if (w != kInf) logC = lse(logC, -w);
        } else {
          if (w == kInf) throw DomainError("site_conditional: black source at +inf");
          if (w != -kInf) logD = lse(logD, w);
        }
        break;
      case EdgeColor::Red:
        A += is_src ? -spec.alpha : spec.alpha;
        break;
    }
  }
  return LogGig(A, logC, logD);
}

void heat_bath_sweep(const GibbsSpec& spec, GibbsState& state, Rng& rng, Scan scan) {
  const int n = static_cast<int>(spec.domain->size());
  if (static_cast<int>(state.size()) != n) throw DomainError("heat_bath_sweep: state does not match the domain");
  for (int t = 0; t < n; ++t) {
    const int v = scan == Scan::Forward ? t : n - 1 - t;
    state[static_cast<std::size_t>(v)] = site_conditional(spec, state, v).sample(rng);
  }
}

bool block_shift_move(const GibbsSpec& spec, GibbsState& state, const std::vector<int>& block, double delta, Rng& rng) {
  const ColoredDomain& d = *spec.domain;
  std::vector<char> in(d.size(), 0);
  for (int v : block) in[static_cast<std::size_t>(v)] = 1;
  auto member = [&](int node) { return node >= 0 && in[static_cast<std::size_t>(node)]; };
  double diff = 0.0;
  for (int v : block) {
    for (int id : d.incident(v)) {
      const GibbsEdge& e = d.edges()[static_cast<std::size_t>(id)];
      const bool ms = member(e.src), mt = member(e.tgt);
      if (ms && mt) continue;
      const double a = spec.node_value(e.src, state), b = spec.node_value(e.tgt, state);
      const double before = edge_log_weight(e, a, b, spec.alpha);
      const double after = edge_log_weight(e, ms ? a + delta : a, mt ? b + delta : b, spec.alpha);
      diff += after - before;
    }
  }
  if (std::log(uniform01(rng)) < diff) {
    for (int v : block) state[static_cast<std::size_t>(v)] += delta;
    return true;
  }
  return false;
}

void mixing_sweep(const GibbsSpec& spec, GibbsState& state, Rng& rng, int moves, double scale, MixingStats* stats) {
  heat_bath_sweep(spec, state, rng);
  const ColoredDomain& d = *spec.domain;
  const int rows = d.max_row();
  std::vector<int> block;
  for (int m = 0; m < moves; ++m) {
    const int row = static_cast<int>(uniform01(rng) * (rows + 1));  // 0 = all rows
    int maxcol = 0;
    for (const Vertex& v : d.sites())
      if (row == 0 || v.i == row) maxcol = std::max(maxcol, v.j);
    if (maxcol == 0) continue;
    const int len = 1 + static_cast<int>(uniform01(rng) * maxcol);
    block.clear();
    for (std::size_t k = 0; k < d.size(); ++k) {
      const Vertex& v = d.sites()[k];
      if ((row == 0 || v.i == row) && v.j <= len) block.push_back(static_cast<int>(k));
    }
    const double delta = scale * std::sqrt(static_cast<double>(len)) * normal01(rng);
    const bool ok = block_shift_move(spec, state, block, delta, rng);
    if (stats) {
      ++stats->proposed;
      stats->accepted += ok ? 1 : 0;
    }
  }
}

MonotoneCoupledChains::MonotoneCoupledChains(std::vector<GibbsSpec> specs, std::vector<GibbsState> init)
    : specs_(std::move(specs)), states_(std::move(init)) {
  if (specs_.empty() || specs_.size() != states_.size()) throw DomainError("coupled chains: need one initial state per spec");
  const std::size_t n = specs_[0].domain->size();
  for (std::size_t c = 0; c < specs_.size(); ++c) {
    if (specs_[c].domain->size() != n || states_[c].size() != n) throw DomainError("coupled chains: domains differ");
    if (specs_[c].alpha != specs_[0].alpha) throw DomainError("coupled chains: alpha must agree");
    if (c == 0) continue;
    const auto& lo = specs_[c - 1].boundary_values;
    const auto& hi = specs_[c].boundary_values;
    for (std::size_t b = 0; b < lo.size(); ++b)
      if (lo[b] > hi[b]) throw DomainError("coupled chains: boundary values are not ordered");
    for (std::size_t v = 0; v < n; ++v)
      if (states_[c - 1][v] > states_[c][v]) throw DomainError("coupled chains: initial states are not ordered");
  }
}

void MonotoneCoupledChains::sweep(Rng& rng) {
  const std::size_t n = specs_[0].domain->size();
  for (std::size_t v = 0; v < n; ++v) {
    const double u = uniform01(rng);
    for (std::size_t c = 0; c < specs_.size(); ++c)
      states_[c][v] = site_conditional(specs_[c], states_[c], static_cast<int>(v)).quantile(u);
  }
  ++sweeps_;
  for (std::size_t c = 1; c < specs_.size(); ++c) {
    for (std::size_t v = 0; v < n; ++v) {
      const double ex = states_[c - 1][v] - states_[c][v];
      ++comparisons_;
      max_excess_ = std::max(max_excess_, ex);
      if (ex > 1e-12) throw InvariantBreach("coupled chains: pointwise order violated");
    }
  }
}

BottomFreeSampler::BottomFreeSampler(double theta, double alpha)
    : BottomFreeSampler(std::make_shared<ConvolutionOracle>(theta), alpha) {}

BottomFreeSampler::BottomFreeSampler(std::shared_ptr<const ConvolutionOracle> oracle, double alpha)
    : oracle_(std::move(oracle)), theta_(oracle_->theta()), alpha_(alpha) {
  if (alpha_ > 0.0) prw_ = std::make_unique<PrwSampler>(oracle_, alpha_);
}

BottomFreeRoute BottomFreeSampler::resolve(int k, BottomFreeRoute route) const {
  const bool inside = std::abs(alpha_) < theta_;
  if (k == 1) {
    if (!inside) throw DomainError("bottom-free k=1 needs alpha in (-theta, theta)");
    if (route != BottomFreeRoute::Auto && route != BottomFreeRoute::Exact)
      throw DomainError("bottom-free k=1 is sampled exactly");
    return BottomFreeRoute::Exact;
  }
  if (k != 2) throw DomainError("bottom-free sampling supports k in {1, 2}");
  switch (route) {
    case BottomFreeRoute::Exact:
      throw DomainError("bottom-free k=2 has no exact route");
    case BottomFreeRoute::Critical:
      if (!inside) throw DomainError("critical representation needs alpha in (-theta, theta)");
      return route;
    case BottomFreeRoute::Supercritical:
      if (!(alpha_ > 0.0)) throw DomainError("supercritical representation needs alpha > 0");
      return route;
    case BottomFreeRoute::Auto:
      break;
  }
  if (alpha_ <= -theta_) throw DomainError("bottom-free k=2: alpha <= -theta is outside the supported range");
  if (alpha_ <= 0.0) return BottomFreeRoute::Critical;
  if (alpha_ >= theta_) return BottomFreeRoute::Supercritical;
  return alpha_ < 0.5 * theta_ ? BottomFreeRoute::Critical : BottomFreeRoute::Supercritical;
}

BottomFreeSample BottomFreeSampler::sample(int k, int T, const std::vector<double>& y, Rng& rng,
                                           BottomFreeRoute route) const {
  if (T < 2) throw DomainError("bottom-free: T must be >= 2");
  if (static_cast<int>(y.size()) < k) throw DomainError("bottom-free: need one pin per curve");
  BottomFreeSample s;
  s.k = k;
  s.T = T;
  s.route = resolve(k, route);
  const double th = theta_, al = alpha_;
  auto qfill = [&](std::vector<double>& c, int first_even_or_odd, double t1, double t2, int sign) {
    // fill c(j) for j = first, first + 2, ..., from neighbours j-1, j+1
    for (std::size_t j = static_cast<std::size_t>(first_even_or_odd); j + 1 <= c.size(); j += 2)
      c[j - 1] = QDist(t1, t2, sign, c[j - 2], c[j]).sample(rng);
  };
  if (s.route == BottomFreeRoute::Exact || s.route == BottomFreeRoute::Critical) {
    std::vector<double> c1(static_cast<std::size_t>(2 * T - 1));
    c1[2 * T - 2] = y[0];
    for (int m = T - 1; m >= 1; --m)
      c1[2 * m - 2] = c1[2 * m] + log_gamma_variate(th - al, rng) - log_gamma_variate(th + al, rng);
    qfill(c1, 2, th - al, th + al, +1);
    s.curves.push_back(std::move(c1));
    if (k == 1) return s;
    std::vector<double> c2(static_cast<std::size_t>(2 * T));
    c2[2 * T - 1] = y[1];
    for (int m = T - 1; m >= 1; --m)
      c2[2 * m - 1] = c2[2 * m + 1] + log_gamma_variate(th + al, rng) - log_gamma_variate(th - al, rng);
    qfill(c2, 3, th - al, th + al, -1);
    c2[0] = c2[1] + log_gamma_variate(th + al, rng);
    const auto& L1 = s.curves[0];
    double acc = 0.0;
    for (int m = 1; m <= T - 1; ++m) {
      const double l2 = c2[2 * m - 1];
      acc += std::exp(l2 - L1[2 * m - 2]) + std::exp(l2 - L1[2 * m]);
    }
    s.log_weight = -acc;
    s.curves.push_back(std::move(c2));
    return s;
  }
  // supercritical: odd points of L_1 and even points of L_2 form a WPRW
  const WprwSample w = prw_->weighted_sample(T, y[0], y[1], rng);
  std::vector<double> c1(static_cast<std::size_t>(2 * T - 1), std::numeric_limits<double>::quiet_NaN());
  std::vector<double> c2(static_cast<std::size_t>(2 * T), std::numeric_limits<double>::quiet_NaN());
  s.truncated = w.truncated;
  s.log_weight = w.log_weight;
  if (!w.truncated) {
    for (int m = 1; m <= T; ++m) {
      c1[2 * m - 2] = w.S1[m - 1];
      c2[2 * m - 1] = w.S2[m - 1];
    }
    qfill(c1, 2, th, th, +1);
    qfill(c2, 3, th, th, -1);
    c2[0] = c2[1] + log_gamma_variate(th + al, rng);
  }
  s.curves.push_back(std::move(c1));
  s.curves.push_back(std::move(c2));
  return s;
}

McEstimate v_normalizer_estimate(const BottomFreeSampler& sampler, const std::vector<double>& y,
                                 const std::vector<double>& z, int k, int T, long samples, std::uint64_t seed,
                                 std::uint64_t stream, BottomFreeRoute route) {
  if (static_cast<int>(z.size()) != T) throw DomainError("v_normalizer_estimate: need |z| = T");
  if (samples < 2) throw DomainError("v_normalizer_estimate: need at least two samples");
  std::vector<double> lw, phi;
  for (long r = 0; r < samples; ++r) {
    Rng rng = make_rng(seed, stream, static_cast<std::uint64_t>(r));
    const BottomFreeSample s = sampler.sample(k, T, y, rng, route);
    lw.push_back(s.log_weight);
    double lp = 0.0;
    if (!s.truncated) {
      const auto& L = s.curves[static_cast<std::size_t>(k - 1)];
      for (int j = 1; j <= T; ++j) {
        const double zj = z[static_cast<std::size_t>(j - 1)];
        if (zj == -kInf) continue;
        const double up = (2 * j + 1 <= static_cast<int>(L.size())) ? L[2 * j] : kInf;
        if (up != kInf) lp -= std::exp(zj - up);
        lp -= std::exp(zj - L[2 * j - 2]);
      }
    }
    phi.push_back(s.truncated ? 0.0 : std::exp(lp));
  }
  double sw = 0, sw2 = 0, swf = 0;
  for (std::size_t r = 0; r < lw.size(); ++r) {
    const double w = std::exp(lw[r]);
    sw += w;
    sw2 += w * w;
    swf += w * phi[r];
  }
  if (!(sw > 0.0)) throw EstimationError("v_normalizer_estimate: zero effective samples");
  McEstimate e;
  e.samples = samples;
  e.ess = sw * sw / sw2;
  e.estimate = swf / sw;
  double s2 = 0;
  for (std::size_t r = 0; r < lw.size(); ++r) {
    const double w = std::exp(lw[r]);
    s2 += w * w * (phi[r] - e.estimate) * (phi[r] - e.estimate);
  }
  e.se = std::sqrt(s2) / sw;
  return e;
}

double TwoSidedSamples::weighted_mean(const std::function<double(const Path&)>& fn) const {
  const double mx = *std::max_element(log_weights.begin(), log_weights.end());
  double sw = 0, swf = 0;
  for (std::size_t s = 0; s < paths.size(); ++s) {
    const double w = std::exp(log_weights[s] - mx);
    sw += w;
    swf += w * fn(paths[s]);
  }
  return swf / sw;
}

const Path& TwoSidedSamples::resample(Rng& rng) const {
  const double mx = *std::max_element(log_weights.begin(), log_weights.end());
  double tot = 0;
  for (double l : log_weights) tot += std::exp(l - mx);
  double u = uniform01(rng) * tot;
  for (std::size_t s = 0; s < paths.size(); ++s) {
    u -= std::exp(log_weights[s] - mx);
    if (u <= 0) return paths[s];
  }
  return paths.back();
}

TwoSidedSamples two_sided_conditional_sample(const WalkSampler& walks, const std::vector<double>& z, double a, double b,
                                             int T1, int T2, long samples, std::uint64_t seed, std::uint64_t stream,
                                             double min_ess) {
  if (T1 < 1 || !(T1 < T2 - 1)) throw DomainError("two-sided conditional: need 1 <= T1 < T2 - 1");
  if (static_cast<int>(z.size()) < T2 - 1) throw DomainError("two-sided conditional: z row too short");
  TwoSidedSamples out;
  out.T1 = T1;
  out.T2 = T2;
  const int n = T2 - T1 + 1;
  for (long r = 0; r < samples; ++r) {
    Rng rng = make_rng(seed, stream, static_cast<std::uint64_t>(r));
    const Path p = walks.bridge(n, a, b, rng);  // p[idx] = X(T1 - 1 + idx)
    double lw = 0.0;
    for (int j = T1; j <= T2 - 1; ++j) {
      const double zj = z[static_cast<std::size_t>(j - 1)];
      if (zj == -kInf) continue;
      lw -= std::exp(zj - p[static_cast<std::size_t>(j - T1 + 1)]) + std::exp(zj - p[static_cast<std::size_t>(j - T1)]);
    }
    out.paths.emplace_back(p.begin() + 1, p.end() - 1);
    out.log_weights.push_back(lw);
  }
  const double mx = *std::max_element(out.log_weights.begin(), out.log_weights.end());
  double sw = 0, sw2 = 0;
  for (double l : out.log_weights) {
    const double w = std::exp(l - mx);
    sw += w;
    sw2 += w * w;
  }
  out.ess = sw * sw / sw2;
  if (out.ess < min_ess) throw EstimationError("two-sided conditional: effective sample size below threshold");
  return out;
}

}  // namespace hslg
