#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hslg/ensemble.hpp"
#include "hslg/errors.hpp"
#include "hslg/gibbs.hpp"
#include "hslg/harness.hpp"
#include "hslg/parallel.hpp"
#include "hslg/polymer.hpp"
#include "hslg/rng.hpp"
#include "hslg/walks.hpp"
#include "hslg_acceptance/acceptance.hpp"

using namespace hslg;

namespace {

constexpr std::uint64_t kSimulateExp = 0x53494D;

struct Global {
  std::uint64_t seed = 20240611;
  int threads = 0;
  std::string out;
  bool json = false;
};

struct SimOptions {
  std::string model = "polymer";
  int N = 64;
  long replicas = 1;
  double theta = 1.0;
  double alpha = 1.0;
  double k_line = 0.0;
  int depth = 3;
  int k = 2, T = 8;
  std::vector<double> y;
  int sweeps = 0;
  std::string variant = "bridge";
  int n = 16;
  double a = 0.0, b = 0.0;
};

std::uint64_t env_seed(std::uint64_t fallback) {
  const char* s = std::getenv("HSLG_SEED");
  if (!s || !*s) return fallback;
  char* end = nullptr;
  const auto v = std::strtoull(s, &end, 0);
  if (*end) throw DomainError("HSLG_SEED is not an integer");
  return v;
}

void emit(const Table& t, const Global& g) {
  ExperimentConfig sink;
  sink.out = g.out;
  sink.json = g.json;
  write_outputs(t, sink);
}

Table sim_polymer(const SimOptions& o, const Global& g) {
  const auto params = PolymerParams::homogeneous(o.theta, o.alpha);
  params.validate(o.N);
  std::vector<double> point(static_cast<std::size_t>(o.replicas)), line(point.size());
  parallel_for(point.size(), g.threads, [&](std::size_t r) {
    const auto f = gen_weights(o.N, params, g.seed, r);
    const auto anti = logZ_antidiagonal(f, o.N, o.N - 1);
    point[r] = anti[0];
    line[r] = logZ_line_from_antidiagonal(anti, o.N, o.k_line);
  });
  Table t;
  t.columns = {"replica", "logZ_NN", "logZ_line"};
  for (std::size_t r = 0; r < point.size(); ++r) t.add_row({static_cast<long long>(r), point[r], line[r]});
  return t;
}

Table sim_ensemble(const SimOptions& o, const Global& g) {
  const auto f = gen_weights(o.N, PolymerParams::homogeneous(o.theta, o.alpha), g.seed);
  const auto ens = build_line_ensemble(symmetrize(f), o.N, o.theta, o.depth);
  Table t;
  t.add_meta("centering", ens.centering);
  t.columns = {"i", "j", "L"};
  for (int i = 1; i <= ens.depth(); ++i)
    for (int j = 1; j <= static_cast<int>(ens.curves[static_cast<std::size_t>(i - 1)].size()); ++j)
      t.add_row({static_cast<long long>(i), static_cast<long long>(j), ens.at(i, j)});
  return t;
}

// Bottom-free K_{k,T} sample, optionally followed by heat-bath sweeps with
// the bottom row at -inf; sweeps move a weighted draw toward the measure itself.
Table sim_gibbs(const SimOptions& o, const Global& g) {
  std::vector<double> y = o.y;
  if (y.empty()) y.assign(static_cast<std::size_t>(o.k), 0.0);
  if (static_cast<int>(y.size()) != o.k) throw DomainError("--y needs k values");
  BottomFreeSampler bf(o.theta, o.alpha);
  Rng rng = make_rng(g.seed, kSimulateExp, 0);
  BottomFreeSample s = bf.sample(o.k, o.T, y, rng);
  if (o.sweeps > 0) {
    const std::vector<double> z(static_cast<std::size_t>(o.T), -std::numeric_limits<double>::infinity());
    const auto spec = make_K_spec(o.k, o.T, o.theta, o.alpha, y, z);
    GibbsState st(spec.domain->size());
    const auto& sites = spec.domain->sites();
    for (std::size_t v = 0; v < st.size(); ++v) st[v] = s.at(sites[v].i, sites[v].j);
    for (int w = 0; w < o.sweeps; ++w) heat_bath_sweep(spec, st, rng);
    for (std::size_t v = 0; v < st.size(); ++v)
      s.curves[static_cast<std::size_t>(sites[v].i - 1)][static_cast<std::size_t>(sites[v].j - 1)] = st[v];
  }
  Table t;
  // after sweeps the chain targets the measure itself, the proposal weight no longer applies
  if (o.sweeps > 0) t.add_meta("sweeps", std::to_string(o.sweeps));
  else t.add_meta("log_weight", s.log_weight);
  t.add_meta("truncated", s.truncated ? "true" : "false");
  t.columns = {"i", "j", "L"};
  for (int i = 1; i <= static_cast<int>(s.curves.size()); ++i)
    for (int j = 1; j <= static_cast<int>(s.curves[static_cast<std::size_t>(i - 1)].size()); ++j)
      t.add_row({static_cast<long long>(i), static_cast<long long>(j), s.at(i, j)});
  return t;
}

Table sim_walks(const SimOptions& o, const Global& g) {
  Rng rng = make_rng(g.seed, kSimulateExp, 1);
  Table t;
  if (o.variant == "prw") {
    PrwSampler prw(o.theta, o.alpha);
    const auto s = prw.weighted_sample(o.n, o.a, o.b, rng);
    t.add_meta("log_weight", s.log_weight);
    t.columns = {"k", "S1", "S2"};
    for (int k = 1; k <= s.n(); ++k)
      t.add_row({static_cast<long long>(k), s.S1[static_cast<std::size_t>(k - 1)], s.S2[static_cast<std::size_t>(k - 1)]});
    return t;
  }
  WalkSampler ws(o.theta);
  Path p;
  if (o.variant == "walk")
    p = ws.walk(o.n, o.a, rng);
  else if (o.variant == "bridge")
    p = ws.bridge(o.n, o.a, o.b, rng);
  else
    throw DomainError("unknown walk variant '" + o.variant + "'");
  t.columns = {"k", "S"};
  for (int k = 1; k <= static_cast<int>(p.size()); ++k) t.add_row({static_cast<long long>(k), p[static_cast<std::size_t>(k - 1)]});
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Half-space log-gamma polymer and line ensemble simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  auto* seed_opt = app.add_option("--seed", g.seed, "global seed (HSLG_SEED also works)");
  auto* threads_opt = app.add_option("--threads", g.threads, "worker threads, 0 = hardware");
  auto* out_opt = app.add_option("--out", g.out, "output CSV path (default stdout)");
  app.add_flag("--json", g.json, "also write a JSON mirror");

  SimOptions so;
  auto* sim = app.add_subcommand("simulate", "draw samples from one model");
  sim->add_option("--model", so.model, "polymer | ensemble | gibbs | walks")
      ->check(CLI::IsMember({"polymer", "ensemble", "gibbs", "walks"}));
  sim->add_option("--N", so.N, "system size");
  sim->add_option("--replicas", so.replicas, "polymer replicas");
  sim->add_option("--theta", so.theta);
  sim->add_option("--alpha", so.alpha, "boundary parameter (zeta for walks)");
  sim->add_option("--k-line", so.k_line, "point-to-line offset");
  sim->add_option("--depth", so.depth, "ensemble curves");
  sim->add_option("--k", so.k, "gibbs curves");
  sim->add_option("--T", so.T, "gibbs half-length");
  sim->add_option("--y", so.y, "gibbs pins, k values")->delimiter(',');
  sim->add_option("--sweeps", so.sweeps, "gibbs heat-bath sweeps after the bottom-free draw");
  sim->add_option("--variant", so.variant, "walks: walk | bridge | prw");
  sim->add_option("--n", so.n, "walk length");
  sim->add_option("--a", so.a, "start (prw: S1 end)");
  sim->add_option("--b", so.b, "end (prw: S2 end)");

  std::string name, config_path;
  bool print_defaults = false;
  std::vector<std::string> sets;
  auto* ex = app.add_subcommand("experiment", "run a named experiment campaign");
  ex->add_option("name", name, "experiment name")->required()->check(CLI::IsMember(experiment_names()));
  ex->add_option("--config", config_path, "config file");
  ex->add_option("--set", sets, "key=value override, repeatable");
  ex->add_flag("--print-defaults", print_defaults, "print the default config and exit");

  std::vector<int> ids;
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  verify->add_option("ids", ids, "criterion ids (default: all)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      if (!*seed_opt) g.seed = env_seed(g.seed);
      Table t;
      if (so.model == "polymer") t = sim_polymer(so, g);
      else if (so.model == "ensemble") t = sim_ensemble(so, g);
      else if (so.model == "gibbs") t = sim_gibbs(so, g);
      else t = sim_walks(so, g);
      std::vector<std::pair<std::string, std::string>> meta{{"model", so.model}, {"seed", std::to_string(g.seed)}};
      meta.insert(meta.end(), t.meta.begin(), t.meta.end());
      t.meta = std::move(meta);
      emit(t, g);
      return 0;
    }
    if (*ex) {
      ExperimentConfig cfg = config_path.empty() ? default_config(name) : load_config(config_path, name);
      if (print_defaults) {
        std::cout << format_config(cfg);
        return 0;
      }
      for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw DomainError("--set expects key=value, got '" + kv + "'");
        set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
      }
      apply_env_overrides(cfg);
      if (*seed_opt) cfg.seed = g.seed;
      if (*threads_opt) cfg.threads = g.threads;
      if (*out_opt) cfg.out = g.out;
      if (g.json) cfg.json = true;
      cfg.validate();
      write_outputs(run_experiment(cfg), cfg);
      return 0;
    }
    if (*verify) {
      acceptance::Options opt;
      opt.seed = *seed_opt ? g.seed : env_seed(opt.seed);
      opt.threads = g.threads;
      opt.only = ids;
      opt.on_result = [](const acceptance::CriterionResult& r) {
        std::printf("%s C%-2d %-32s %8.1fs  %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                    r.detail.c_str());
        std::fflush(stdout);
      };
      const auto res = acceptance::run_acceptance(opt);
      int failed = 0;
      for (const auto& r : res) failed += r.passed ? 0 : 1;
      std::printf("%zu criteria, %d failed\n", res.size(), failed);
      return failed == 0 ? 0 : 1;
    }
  } catch (const RefusalError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
