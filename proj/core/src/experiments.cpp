#include <algorithm>
#include <cmath>
#include <numeric>

#include "hslg/ensemble.hpp"
#include "hslg/errors.hpp"
#include "hslg/gibbs.hpp"
#include "hslg/harness.hpp"
#include "hslg/parallel.hpp"
#include "hslg/specfun.hpp"

namespace hslg {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint64_t replica_stream(std::uint64_t exp, long r) { return (exp << 32) | static_cast<std::uint64_t>(r); }

struct ConstantSource {
  double log_weight(int, int) const { return 0.0; }
};

// Calls fn(src) with the disorder of replica r at size N.
template <class Fn>
auto with_source(const ExperimentConfig& cfg, std::uint64_t exp, int N, long r, Fn&& fn) {
  if (cfg.disorder == "constant") return fn(ConstantSource{});
  const WeightGenerator gen(N, cfg.polymer(), stream_key(cfg.seed, replica_stream(exp, r), static_cast<std::uint64_t>(N)));
  return fn(gen);
}

LogWeightField make_field(const ExperimentConfig& cfg, std::uint64_t exp, int N, long r) {
  if (cfg.disorder == "constant") return LogWeightField::constant(N, 0.0);
  return LogWeightField(N, cfg.polymer(), cfg.seed, replica_stream(exp, r));
}

Table base_table(const ExperimentConfig& cfg) {
  Table t;
  for (const auto& [k, v] : config_items(cfg))
    if (k != "threads" && k != "out" && k != "json") t.add_meta(k, v);  // scheduling only, never affects the numbers
  return t;
}

void require_replicas(const ExperimentConfig& cfg, long minimum) {
  if (cfg.replicas < minimum)
    throw RefusalError(cfg.experiment + ": at least " + std::to_string(minimum) + " replicas required");
}

double var_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double m = mean(v);
  double m2 = 0, m4 = 0;
  for (double x : v) {
    m2 += (x - m) * (x - m);
    m4 += std::pow(x - m, 4);
  }
  m2 /= n;
  m4 /= n;
  return std::sqrt(std::max(0.0, (m4 - m2 * m2 * (n - 3) / (n - 1)) / n));
}

}  // namespace

FluctuationRecord run_fluctuation_exponent(const ExperimentConfig& cfg) {
  cfg.validate();
  require_replicas(cfg, 100);
  if (cfg.N_grid.size() < 4) throw DomainError("fluctuation_exponent: need at least 4 values of N");
  FluctuationRecord rec;
  std::vector<std::vector<double>> groups;
  for (int N : cfg.N_grid) {
    const double centre = 2.0 * N * digamma(cfg.theta);
    std::vector<double> v(static_cast<std::size_t>(cfg.replicas));
    parallel_for(v.size(), cfg.threads, [&](std::size_t r) {
      v[r] = with_source(cfg, exp_id::fluctuation, N, static_cast<long>(r),
                         [&](const auto& src) { return logZ_point(src, N, N); }) +
             centre;
    });
    FluctuationRow row;
    row.N = N;
    row.replicas = cfg.replicas;
    row.mean = mean(v);
    // identical replicas (constant disorder) must report sd = 0 exactly, not rounding noise
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    row.sd = *lo == *hi ? 0.0 : std::sqrt(variance(v));
    row.sd_se = row.sd / std::sqrt(2.0 * static_cast<double>(cfg.replicas - 1));
    rec.rows.push_back(row);
    groups.push_back(std::move(v));
  }
  rec.degenerate = std::any_of(rec.rows.begin(), rec.rows.end(), [](const FluctuationRow& r) { return !(r.sd > 0.0); });
  if (rec.degenerate) {
    rec.fit = {kNaN, kNaN, kNaN};
    rec.ci = {kNaN, kNaN};
    return rec;
  }
  std::vector<double> lx;
  for (int N : cfg.N_grid) lx.push_back(std::log(static_cast<double>(N)));
  auto slope_of = [&](const std::vector<std::vector<double>>& g) {
    std::vector<double> ly;
    for (const auto& v : g) ly.push_back(0.5 * std::log(variance(v)));
    return ols(lx, ly).slope;
  };
  std::vector<double> ly;
  for (const auto& row : rec.rows) ly.push_back(std::log(row.sd));
  rec.fit = ols(lx, ly);
  rec.ci = bootstrap_ci(groups, slope_of, cfg.bootstrap, 0.95, cfg.seed ^ exp_id::fluctuation);
  return rec;
}

Table FluctuationRecord::table(const ExperimentConfig& cfg) const {
  Table t = base_table(cfg);
  t.add_meta("slope", fit.slope);
  t.add_meta("slope_se", fit.slope_se);
  t.add_meta("slope_ci_lo", ci.lo);
  t.add_meta("slope_ci_hi", ci.hi);
  t.add_meta("degenerate", degenerate ? "true" : "false");
  t.columns = {"N", "replicas", "mean", "sd", "sd_se"};
  for (const auto& r : rows) t.add_row({static_cast<long long>(r.N), static_cast<long long>(r.replicas), r.mean, r.sd, r.sd_se});
  return t;
}

TransversalRecord run_transversal_scaling(const ExperimentConfig& cfg) {
  cfg.validate();
  require_replicas(cfg, 100);
  std::vector<double> deltas = cfg.delta_grid;
  std::sort(deltas.begin(), deltas.end());
  TransversalRecord rec;
  for (int N : cfg.N_grid) {
    const double scale = std::pow(static_cast<double>(N), 2.0 / 3.0);
    const int kmax = std::min(N - 1, static_cast<int>(std::ceil(cfg.r * scale)));
    const double alpha = cfg.alpha(N);
    std::vector<double> diff(static_cast<std::size_t>(cfg.replicas));
    std::vector<std::vector<double>> omega(static_cast<std::size_t>(cfg.replicas));
    parallel_for(diff.size(), cfg.threads, [&](std::size_t r) {
      const auto anti = with_source(cfg, exp_id::transversal, N, static_cast<long>(r),
                                    [&](const auto& src) { return logZ_antidiagonal(src, N, kmax); });
      const FreeEnergyProcess F = free_energy_process_from_antidiagonal(anti, N, cfg.theta, alpha, cfg.r, cfg.s_grid);
      diff[r] = F.values.back() - F.values.front();
      for (double d : deltas)
        omega[r].push_back(modulus_of_continuity(F.lattice_F, std::max(1, static_cast<int>(std::floor(d * scale)))));
    });
    TransversalRow row;
    row.N = N;
    row.replicas = cfg.replicas;
    row.var_diff = variance(diff);
    row.var_se = var_se(diff);
    rec.rows.push_back(row);
    for (std::size_t d = 0; d < deltas.size(); ++d) {
      double s = 0;
      for (const auto& o : omega) s += o[d];
      rec.modulus.push_back({N, deltas[d], s / static_cast<double>(omega.size())});
    }
    for (const auto& o : omega)
      for (std::size_t d = 1; d < o.size(); ++d)
        if (o[d] < o[d - 1]) ++rec.monotone_failures;
  }
  for (std::size_t k = 1; k < rec.rows.size(); ++k) rec.ratios.push_back(rec.rows[k].var_diff / rec.rows[k - 1].var_diff);
  return rec;
}

Table TransversalRecord::table(const ExperimentConfig& cfg) const {
  Table t = base_table(cfg);
  for (std::size_t k = 0; k < ratios.size(); ++k) t.add_meta("collapse_ratio_" + std::to_string(k + 1), ratios[k]);
  t.add_meta("modulus_monotone_failures", std::to_string(monotone_failures));
  t.columns = {"kind", "N", "replicas", "delta", "value", "se"};
  for (const auto& r : rows)
    t.add_row({std::string("var_diff"), static_cast<long long>(r.N), static_cast<long long>(r.replicas), kNaN, r.var_diff, r.var_se});
  for (const auto& m : modulus)
    t.add_row({std::string("mean_modulus"), static_cast<long long>(m.N), kNaN, m.delta, m.mean_omega, kNaN});
  return t;
}

ParabolaRecord run_parabola(const ExperimentConfig& cfg) {
  cfg.validate();
  require_replicas(cfg, 100);
  std::vector<double> Ms = cfg.M_grid;
  std::sort(Ms.begin(), Ms.end());
  const double nu = nu_constant(cfg.theta);
  ParabolaRecord rec;
  for (int N : cfg.N_grid) {
    const double n13 = std::cbrt(static_cast<double>(N)), n23 = n13 * n13;
    for (double M : Ms)
      if (!(M > 0.0 && M < n13 / 2.0)) throw DomainError("parabola: need M in (0, N^{1/3}/2)");
    const double centre = 2.0 * digamma(cfg.theta) * N;
    std::vector<std::vector<double>> vals(Ms.size(), std::vector<double>(static_cast<std::size_t>(cfg.replicas)));
    std::vector<char> bad(static_cast<std::size_t>(cfg.replicas), 0);
    parallel_for(static_cast<std::size_t>(cfg.replicas), cfg.threads, [&](std::size_t r) {
      const auto anti = with_source(cfg, exp_id::parabola, N, static_cast<long>(r),
                                    [&](const auto& src) { return logZ_antidiagonal(src, N, N - 1); });
      double prev = std::numeric_limits<double>::infinity();
      for (std::size_t m = 0; m < Ms.size(); ++m) {
        const double V = (logZ_line_from_antidiagonal(anti, N, Ms[m] * n23) + centre) / (n13 * nu);
        if (V > prev + 1e-12) bad[r] = 1;
        prev = V;
        vals[m][r] = V + Ms[m] * Ms[m];
      }
    });
    rec.monotone_failures += std::accumulate(bad.begin(), bad.end(), 0L);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t m = 0; m < Ms.size(); ++m) {
      ParabolaRow row;
      row.N = N;
      row.M = Ms[m];
      row.k = Ms[m] * n23;
      row.replicas = cfg.replicas;
      row.q25 = quantile(vals[m], 0.25);
      row.median = quantile(vals[m], 0.5);
      row.q75 = quantile(vals[m], 0.75);
      row.mean = mean(vals[m]);
      lo = std::min(lo, row.median);
      hi = std::max(hi, row.median);
      rec.rows.push_back(row);
    }
    rec.median_band[N] = hi - lo;
  }
  return rec;
}

Table ParabolaRecord::table(const ExperimentConfig& cfg) const {
  Table t = base_table(cfg);
  t.add_meta("nu", nu_constant(cfg.theta));
  for (const auto& [N, b] : median_band) t.add_meta("median_band_N" + std::to_string(N), b);
  t.add_meta("monotone_failures", std::to_string(monotone_failures));
  t.columns = {"N", "M", "k", "replicas", "q25", "median", "q75", "mean"};
  for (const auto& r : rows)
    t.add_row({static_cast<long long>(r.N), r.M, r.k, static_cast<long long>(r.replicas), r.q25, r.median, r.q75, r.mean});
  return t;
}

Point2LineRecord run_point2line_clt(const ExperimentConfig& cfg) {
  cfg.validate();
  require_replicas(cfg, 100);
  Point2LineRecord rec;
  rec.reference = load_tw_reference();
  for (int N : cfg.N_grid) {
    const double alpha = cfg.alpha(N);
    if (cfg.alpha_rule == PolymerParams::AlphaRule::Fixed && !(alpha > 0.0))
      throw DomainError("point2line_clt: fixed alpha must be positive");
    const double k = cfg.k_line;
    if (!(k > 0.0 && k < N)) throw DomainError("point2line_clt: need 0 < k < N");
    Point2LineRow row;
    row.N = N;
    row.k = k;
    row.p = (N + k) / (N - k);
    row.alpha = alpha;
    const Point2LineConstants c = point2line_constants({cfg.theta, row.p});
    row.f = c.f;
    row.sigma = c.sigma;
    const double scale = std::cbrt(N - k) * c.sigma;
    std::vector<double> v(static_cast<std::size_t>(cfg.replicas));
    parallel_for(v.size(), cfg.threads, [&](std::size_t r) {
      const auto anti = with_source(cfg, exp_id::point2line, N, static_cast<long>(r),
                                    [&](const auto& src) { return logZ_antidiagonal(src, N, N - 1); });
      v[r] = (logZ_line_from_antidiagonal(anti, N, k) - (N - k) * c.f) / scale;
    });
    row.replicas = cfg.replicas;
    row.mean = mean(v);
    row.variance = variance(v);
    row.skewness = skewness(v);
    row.excess_kurtosis = excess_kurtosis(v);
    row.mean_se = std::sqrt(row.variance / static_cast<double>(v.size()));
    rec.rows.push_back(row);
  }
  return rec;
}

Table Point2LineRecord::table(const ExperimentConfig& cfg) const {
  Table t = base_table(cfg);
  t.add_meta("tw_mean", reference.mean);
  t.add_meta("tw_variance", reference.variance);
  t.add_meta("tw_skewness", reference.skewness);
  t.add_meta("tw_excess_kurtosis", reference.excess_kurtosis);
  t.add_meta("tw_source", reference.source);
  t.columns = {"N", "k", "p", "alpha", "f", "sigma", "replicas", "mean", "mean_se", "variance", "skewness", "excess_kurtosis"};
  for (const auto& r : rows)
    t.add_row({static_cast<long long>(r.N), r.k, r.p, r.alpha, r.f, r.sigma, static_cast<long long>(r.replicas), r.mean,
               r.mean_se, r.variance, r.skewness, r.excess_kurtosis});
  return t;
}

double OrderingRow::frequency() const {
  const long used = samples - discarded;
  return used > 0 ? static_cast<double>(samples_with_violation) / static_cast<double>(used) : kNaN;
}

double OrderingRow::check_frequency() const {
  const long v = violations[0] + violations[1] + violations[2] + violations[3];
  const long c = checked[0] + checked[1] + checked[2] + checked[3];
  return c > 0 ? static_cast<double>(v) / static_cast<double>(c) : kNaN;
}

OrderingRecord run_ordering(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.depth < 1) throw DomainError("ordering: depth must be positive");
  OrderingRecord rec;
  for (int N : cfg.N_grid) {
    if (N < cfg.depth + 3) throw DomainError("ordering: N too small for the requested depth");
    std::vector<OrderingReport> reps(static_cast<std::size_t>(cfg.replicas));
    std::vector<char> ok(reps.size(), 0);
    parallel_for(reps.size(), cfg.threads, [&](std::size_t r) {
      const LogWeightField field = make_field(cfg, exp_id::ordering, N, static_cast<long>(r));
      try {
        const LineEnsemble ens = build_line_ensemble(symmetrize(field), N, cfg.theta, cfg.depth);
        reps[r] = ordering_report(ens, cfg.depth, cfg.slack_exponent);
        ok[r] = 1;
      } catch (const NumericalError&) {
      }
    });
    OrderingRow row;
    row.N = N;
    row.depth = cfg.depth;
    row.samples = cfg.replicas;
    row.slack = std::pow(std::log(static_cast<double>(N)), cfg.slack_exponent);
    row.worst_excess.fill(kNegInf);
    for (std::size_t r = 0; r < reps.size(); ++r) {
      if (!ok[r]) {
        ++row.discarded;
        continue;
      }
      for (int f = 0; f < 4; ++f) {
        row.violations[f] += reps[r].violations[f];
        row.checked[f] += reps[r].checked[f];
        row.worst_excess[f] = std::max(row.worst_excess[f], reps[r].worst_excess[f]);
      }
      if (reps[r].total_violations() > 0) ++row.samples_with_violation;
    }
    rec.rows.push_back(row);
  }
  return rec;
}

Table OrderingRecord::table(const ExperimentConfig& cfg) const {
  Table t = base_table(cfg);
  t.columns = {"N", "depth", "samples", "discarded", "slack", "family", "violations", "checked", "worst_excess",
               "samples_with_violation", "frequency"};
  for (const auto& r : rows)
    for (int f = 0; f < 4; ++f)
      t.add_row({static_cast<long long>(r.N), static_cast<long long>(r.depth), static_cast<long long>(r.samples),
                 static_cast<long long>(r.discarded), r.slack, static_cast<long long>(f + 1),
                 static_cast<long long>(r.violations[f]), static_cast<long long>(r.checked[f]), r.worst_excess[f],
                 static_cast<long long>(r.samples_with_violation), r.frequency()});
  return t;
}

EndpointRecord run_endpoint_tightness(const ExperimentConfig& cfg) {
  cfg.validate();
  require_replicas(cfg, 100);
  EndpointRecord rec;
  for (int N : cfg.N_grid) {
    const double n13 = std::cbrt(static_cast<double>(N));
    std::vector<double> a(static_cast<std::size_t>(cfg.replicas), kNaN), b(a.size(), kNaN);
    parallel_for(a.size(), cfg.threads, [&](std::size_t r) {
      const LogWeightField field = make_field(cfg, exp_id::endpoint, N, static_cast<long>(r));
      try {
        const LineEnsemble ens = build_line_ensemble(symmetrize(field), N, cfg.theta, 2, 2);
        a[r] = ens.at(1, 1) / n13;
        b[r] = ens.at(2, 2) / n13;
      } catch (const NumericalError&) {
      }
    });
    EndpointRow row;
    row.N = N;
    row.samples = cfg.replicas;
    std::vector<double> ka, kb;
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (std::isnan(a[r])) {
        ++row.discarded;
        continue;
      }
      ka.push_back(a[r]);
      kb.push_back(b[r]);
    }
    if (ka.empty()) throw EstimationError("endpoint_tightness: every sample was discarded");
    row.L1 = {quantile(ka, 0.25), quantile(ka, 0.5), quantile(ka, 0.75)};
    row.L2 = {quantile(kb, 0.25), quantile(kb, 0.5), quantile(kb, 0.75)};
    rec.rows.push_back(row);
  }
  auto ratio = [&](auto get) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (const auto& r : rec.rows) {
      lo = std::min(lo, get(r));
      hi = std::max(hi, get(r));
    }
    return hi / lo;
  };
  rec.iqr_ratio1 = ratio([](const EndpointRow& r) { return r.iqr1(); });
  rec.iqr_ratio2 = ratio([](const EndpointRow& r) { return r.iqr2(); });
  return rec;
}

Table EndpointRecord::table(const ExperimentConfig& cfg) const {
  Table t = base_table(cfg);
  t.add_meta("iqr_ratio_L1", iqr_ratio1);
  t.add_meta("iqr_ratio_L2", iqr_ratio2);
  t.columns = {"N", "samples", "discarded", "L1_q25", "L1_median", "L1_q75", "L1_iqr", "L2_q25", "L2_median", "L2_q75", "L2_iqr"};
  for (const auto& r : rows)
    t.add_row({static_cast<long long>(r.N), static_cast<long long>(r.samples), static_cast<long long>(r.discarded), r.L1[0],
               r.L1[1], r.L1[2], r.iqr1(), r.L2[0], r.L2[1], r.L2[2], r.iqr2()});
  return t;
}

RegionPassRecord run_region_pass(const ExperimentConfig& cfg) {
  cfg.validate();
  require_replicas(cfg, 100);
  RegionPassRecord rec;
  std::uint64_t cell = 0;
  for (int N : cfg.N_grid) {
    const double n13 = std::cbrt(static_cast<double>(N));
    const int T = static_cast<int>(std::floor(cfg.r * n13 * n13));
    if (T < 1) throw DomainError("region_pass: r N^{2/3} < 1");
    for (int p : cfg.p_grid) {
      if (p != 1 && p != 2) throw DomainError("region_pass: p must be 1 or 2");
      const double alpha = p == 1 ? cfg.mu / n13 : cfg.zeta;
      const BottomFreeSampler sampler(cfg.theta, alpha);
      for (double M : cfg.M_grid) {
        std::vector<double> y;
        for (int i = 1; i <= p; ++i) y.push_back(-(M + i - 1) * n13);
        const double level = 2.0 * M * n13;
        const int last = 2 * T + p - 2;
        std::vector<double> lw(static_cast<std::size_t>(cfg.replicas)), hit(lw.size());
        const std::uint64_t stream = replica_stream(exp_id::region_pass, static_cast<long>(cell++));
        parallel_for(lw.size(), cfg.threads, [&](std::size_t s) {
          Rng rng = make_rng(cfg.seed, stream, s);
          const BottomFreeSample b = sampler.sample(p, 2 * T, y, rng);
          lw[s] = b.truncated ? kNegInf : b.log_weight;
          hit[s] = 0.0;
          if (!b.truncated) {
            double inf = std::numeric_limits<double>::infinity();
            for (int j = 1; j <= last; ++j) inf = std::min(inf, b.at(p, j));
            hit[s] = inf >= level ? 1.0 : 0.0;
          }
        });
        RegionPassRow row;
        row.N = N;
        row.p = p;
        row.T = T;
        row.M = M;
        row.r = cfg.r;
        row.alpha = alpha;
        row.samples = cfg.replicas;
        const double mx = *std::max_element(lw.begin(), lw.end());
        if (mx == kNegInf) {
          row.frequency = row.se = kNaN;
          row.ess = 0.0;
        } else {
          double sw = 0, sw2 = 0, swh = 0;
          for (std::size_t s = 0; s < lw.size(); ++s) {
            const double w = std::exp(lw[s] - mx);
            sw += w;
            sw2 += w * w;
            swh += w * hit[s];
          }
          row.frequency = swh / sw;
          row.ess = sw * sw / sw2;
          double v = 0;
          for (std::size_t s = 0; s < lw.size(); ++s) {
            const double w = std::exp(lw[s] - mx);
            v += w * w * (hit[s] - row.frequency) * (hit[s] - row.frequency);
          }
          row.se = std::sqrt(v) / sw;
        }
        rec.rows.push_back(row);
      }
    }
  }
  return rec;
}

Table RegionPassRecord::table(const ExperimentConfig& cfg) const {
  Table t = base_table(cfg);
  t.columns = {"N", "p", "M", "r", "T", "alpha", "samples", "frequency", "se", "ess"};
  for (const auto& r : rows)
    t.add_row({static_cast<long long>(r.N), static_cast<long long>(r.p), r.M, r.r, static_cast<long long>(r.T), r.alpha,
               static_cast<long long>(r.samples), r.frequency, r.se, r.ess});
  return t;
}

GibbsConsistencyRecord run_gibbs_consistency(const ExperimentConfig& cfg) {
  cfg.validate();
  require_replicas(cfg, 1000);
  GibbsConsistencyRecord rec;
  for (int N : cfg.N_grid) {
    if (N < 3 || N > 5) throw DomainError("gibbs_consistency: N must lie in [3, 5]");
    auto dom = std::make_shared<const ColoredDomain>(ColoredDomain::LambdaStar(N, cfg.theta));
    const std::size_t sites = dom->size();
    const double alpha = cfg.alpha(N);
    const std::size_t R = static_cast<std::size_t>(cfg.replicas);
    std::vector<double> direct(R * sites, kNaN), other(R * sites, kNaN);
    auto ensemble_of = [&](std::uint64_t stream) {
      const LogWeightField field = cfg.disorder == "constant" ? LogWeightField::constant(N, 0.0)
                                                              : LogWeightField(N, cfg.polymer(), cfg.seed, stream);
      return build_line_ensemble(symmetrize(field), N, cfg.theta, N);
    };
    parallel_for(R, cfg.threads, [&](std::size_t r) {
      try {
        const LineEnsemble ens = ensemble_of(replica_stream(exp_id::gibbs, static_cast<long>(r)));
        GibbsState state(sites);
        for (std::size_t v = 0; v < sites; ++v) {
          const Vertex& x = dom->sites()[v];
          state[v] = ens.at(x.i, x.j);
        }
        std::vector<double> second;
        if (cfg.resample) {
          const GibbsSpec spec(dom, alpha + cfg.alpha_shift, [&](int i, int j) {
            return (i <= N && j <= 2 * N - 2 * i + 2) ? ens.at(i, j) : kNegInf;
          });
          GibbsState s = state;
          Rng rng = make_rng(cfg.seed, replica_stream(exp_id::gibbs, static_cast<long>(r)), 1);
          for (int k = 0; k < cfg.sweeps; ++k) heat_bath_sweep(spec, s, rng);
          second = s;
        } else {
          // same generator, independent disorder
          const LineEnsemble e2 = ensemble_of(replica_stream(exp_id::gibbs + 1, static_cast<long>(r)));
          for (std::size_t v = 0; v < sites; ++v) {
            const Vertex& x = dom->sites()[v];
            second.push_back(e2.at(x.i, x.j));
          }
        }
        for (std::size_t v = 0; v < sites; ++v) {
          direct[r * sites + v] = state[v];
          other[r * sites + v] = second[v];
        }
      } catch (const NumericalError&) {
      }
    });
    long discarded = 0;
    std::vector<std::vector<double>> a(sites), b(sites);
    for (std::size_t r = 0; r < R; ++r) {
      if (std::isnan(direct[r * sites])) {
        ++discarded;
        continue;
      }
      for (std::size_t v = 0; v < sites; ++v) {
        a[v].push_back(direct[r * sites + v]);
        b[v].push_back(other[r * sites + v]);
      }
    }
    if (a[0].size() < 1000) throw RefusalError("gibbs_consistency: fewer than 1000 usable samples");
    rec.discarded[N] = discarded;
    double mx = 0;
    for (std::size_t v = 0; v < sites; ++v) {
      GibbsSiteRow row;
      row.N = N;
      row.i = dom->sites()[v].i;
      row.j = dom->sites()[v].j;
      row.ks = ks_two_sample(a[v], b[v]);
      row.direct_mean = mean(a[v]);
      row.resampled_mean = mean(b[v]);
      mx = std::max(mx, row.ks);
      rec.rows.push_back(row);
    }
    rec.max_ks[N] = mx;
  }
  return rec;
}

Table GibbsConsistencyRecord::table(const ExperimentConfig& cfg) const {
  Table t = base_table(cfg);
  for (const auto& [N, k] : max_ks) t.add_meta("max_ks_N" + std::to_string(N), k);
  for (const auto& [N, d] : discarded) t.add_meta("discarded_N" + std::to_string(N), std::to_string(d));
  t.columns = {"N", "i", "j", "ks", "direct_mean", "resampled_mean"};
  for (const auto& r : rows)
    t.add_row({static_cast<long long>(r.N), static_cast<long long>(r.i), static_cast<long long>(r.j), r.ks, r.direct_mean,
               r.resampled_mean});
  return t;
}

Table run_experiment(const ExperimentConfig& cfg) {
  const std::string& e = cfg.experiment;
  if (e == "fluctuation_exponent") return run_fluctuation_exponent(cfg).table(cfg);
  if (e == "transversal_scaling") return run_transversal_scaling(cfg).table(cfg);
  if (e == "parabola") return run_parabola(cfg).table(cfg);
  if (e == "point2line_clt") return run_point2line_clt(cfg).table(cfg);
  if (e == "ordering") return run_ordering(cfg).table(cfg);
  if (e == "endpoint_tightness") return run_endpoint_tightness(cfg).table(cfg);
  if (e == "region_pass") return run_region_pass(cfg).table(cfg);
  if (e == "gibbs_consistency") return run_gibbs_consistency(cfg).table(cfg);
  throw DomainError("unknown experiment '" + e + "'");
}

}  // namespace hslg
