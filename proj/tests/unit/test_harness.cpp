#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "hslg/errors.hpp"
#include "hslg/harness.hpp"
#include "hslg/specfun.hpp"

using namespace hslg;

namespace {

std::string csv(const Table& t) {
  std::ostringstream os;
  t.write_csv(os);
  return os.str();
}

std::uint64_t catalan(int n) {
  std::uint64_t c = 1;
  for (int k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
  return c;
}

}  // namespace

TEST_CASE("config text with sections") {
  ExperimentConfig cfg = default_config("parabola");
  apply_config_text(cfg, R"(
# globals
seed = 0x10
theta = 1.5
M = 0.5, 1.5   # trailing comment
[ordering]
theta = 9
[parabola]
replicas = 300
N = 64,128
)");
  CHECK(cfg.seed == 16);
  CHECK(cfg.theta == 1.5);
  CHECK(cfg.replicas == 300);
  CHECK(cfg.N_grid == std::vector<int>{64, 128});
  CHECK(cfg.M_grid == std::vector<double>{0.5, 1.5});

  ExperimentConfig bad = default_config("parabola");
  CHECK_THROWS_AS(apply_config_text(bad, "theta 1.0"), DomainError);
  CHECK_THROWS_AS(apply_config_text(bad, "colour = red"), DomainError);
  CHECK_THROWS_AS(apply_config_text(bad, "theta = one"), DomainError);
  CHECK_THROWS_AS(apply_config_text(bad, "[parabola"), DomainError);
  CHECK_THROWS_AS(apply_config_text(bad, "disorder = uniform"), DomainError);
  CHECK_THROWS_AS(default_config("nope"), DomainError);
}

TEST_CASE("printed defaults parse back") {
  for (const auto& name : experiment_names()) {
    const ExperimentConfig d = default_config(name);
    CHECK_NOTHROW(d.validate());
    ExperimentConfig back = default_config(name);
    back.seed = 1;
    back.theta = 7.0;
    apply_config_text(back, format_config(d));
    CHECK(config_items(back) == config_items(d));
  }
}

TEST_CASE("config files and environment") {
  const auto path = std::filesystem::temp_directory_path() / "hslg_test_cfg.ini";
  {
    std::ofstream f(path);
    f << "replicas = 123\n[transversal_scaling]\nr = 0.5\n";
  }
  const auto c = load_config(path.string(), "transversal_scaling");
  CHECK(c.replicas == 123);
  CHECK(c.r == 0.5);
  CHECK(c.N_grid == default_config("transversal_scaling").N_grid);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(path.string(), "parabola"), DomainError);

  ExperimentConfig e = default_config("ordering");
  setenv("HSLG_SEED", "4242", 1);
  apply_env_overrides(e);
  CHECK(e.seed == 4242);
  setenv("HSLG_SEED", "x", 1);
  CHECK_THROWS_AS(apply_env_overrides(e), DomainError);
  unsetenv("HSLG_SEED");
  apply_env_overrides(e);
  CHECK(e.seed == 4242);
}

TEST_CASE("derived quantities and validation") {
  ExperimentConfig c = default_config("region_pass");
  CHECK(c.T(1000) == 8 * 100);
  CHECK(c.T(1024) == 8 * 101);
  c.alpha_rule = PolymerParams::AlphaRule::Critical;
  c.mu = 2.0;
  CHECK(c.alpha(1000) == doctest::Approx(0.2));
  c.r = 10.0;
  CHECK_THROWS_AS(c.validate(), DomainError);  // N < r^3
  ExperimentConfig d = default_config("fluctuation_exponent");
  d.N_grid = {2};
  CHECK_THROWS_AS(d.validate(), DomainError);
}

TEST_CASE("tables") {
  Table t;
  t.add_meta("seed", "5");
  t.add_meta("x", 0.1);
  t.columns = {"N", "v", "name"};
  t.add_row({10LL, 1.5, std::string("a")});
  t.add_row({20LL, -std::numeric_limits<double>::infinity(), std::string("b")});
  CHECK_THROWS_AS(t.add_row({1LL}), DomainError);
  CHECK(csv(t) == "# seed: 5\n# x: 0.10000000000000001\nN,v,name\n10,1.5,a\n20,-inf,b\n");
  std::ostringstream js;
  t.write_json(js);
  const auto j = nlohmann::json::parse(js.str());
  CHECK(j["meta"]["seed"] == "5");
  CHECK(j["rows"][0][1].get<double>() == 1.5);
  CHECK(j["rows"][1][1] == "-inf");
  CHECK(format_double(std::nan("")) == "nan");

  const auto out = std::filesystem::temp_directory_path() / "hslg_test_out.csv";
  ExperimentConfig cfg = default_config("ordering");
  cfg.out = out.string();
  cfg.json = true;
  write_outputs(t, cfg);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == csv(t));
  CHECK(std::filesystem::exists(out.string() + ".json"));
  std::filesystem::remove(out);
  std::filesystem::remove(out.string() + ".json");
}

TEST_CASE("TW reference data") {
  const auto tw = load_tw_reference();
  CHECK(tw.mean == doctest::Approx(-1.7710868074));
  CHECK(tw.variance == doctest::Approx(0.8131947928));
  CHECK_FALSE(tw.source.empty());
  CHECK_THROWS(load_tw_reference("/nonexistent/tw.json"));
}

TEST_CASE("output does not depend on the thread count") {
  ExperimentConfig c = default_config("fluctuation_exponent");
  c.N_grid = {8, 12, 16, 24};
  c.replicas = 150;
  c.bootstrap = 50;
  c.threads = 1;
  const std::string one = csv(run_experiment(c));
  c.threads = 2;
  CHECK(csv(run_experiment(c)) == one);
  c.seed += 1;
  CHECK(csv(run_experiment(c)) != one);
  CHECK(one.find("threads") == std::string::npos);
  CHECK(one.find("# seed: ") != std::string::npos);
}

TEST_CASE("constant disorder is variance free") {
  ExperimentConfig c = default_config("fluctuation_exponent");
  c.disorder = "constant";
  c.N_grid = {4, 6, 8, 10};
  c.replicas = 100;
  c.threads = 1;
  const auto rec = run_fluctuation_exponent(c);
  CHECK(rec.degenerate);
  CHECK(std::isnan(rec.fit.slope));
  for (const auto& r : rec.rows) {
    CHECK(r.sd == 0.0);
    const double expect = std::log(static_cast<double>(catalan(r.N - 1))) + 2.0 * r.N * digamma(c.theta);
    CHECK(r.mean == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(csv(rec.table(c)).find("# degenerate: true") != std::string::npos);
}

TEST_CASE("refusals") {
  ExperimentConfig c = default_config("fluctuation_exponent");
  c.replicas = 99;
  CHECK_THROWS_AS(run_fluctuation_exponent(c), RefusalError);
  c.replicas = 200;
  c.N_grid = {8, 16, 32};
  CHECK_THROWS_AS(run_fluctuation_exponent(c), DomainError);
  ExperimentConfig g = default_config("gibbs_consistency");
  g.replicas = 999;
  CHECK_THROWS_AS(run_gibbs_consistency(g), RefusalError);
  g.replicas = 1000;
  g.N_grid = {6};
  CHECK_THROWS_AS(run_gibbs_consistency(g), DomainError);
  ExperimentConfig p = default_config("parabola");
  p.N_grid = {64};
  p.M_grid = {3.0};
  CHECK_THROWS_AS(run_parabola(p), DomainError);
  ExperimentConfig x = default_config("ordering");
  x.experiment = "missing";
  CHECK_THROWS_AS(run_experiment(x), DomainError);
}

TEST_CASE("small runs of every experiment") {
  auto small = [](const std::string& name) {
    ExperimentConfig c = default_config(name);
    c.threads = 1;
    c.replicas = 100;
    return c;
  };
  {
    auto c = small("transversal_scaling");
    c.N_grid = {27, 64};
    const auto rec = run_transversal_scaling(c);
    CHECK(rec.monotone_failures == 0);
    REQUIRE(rec.ratios.size() == 1);
    CHECK(rec.rows[0].var_diff > 0.0);
  }
  {
    auto c = small("parabola");
    c.N_grid = {64};
    c.M_grid = {0.25, 0.5, 1.0};
    const auto rec = run_parabola(c);
    CHECK(rec.monotone_failures == 0);
    CHECK(rec.rows.size() == 3);
    for (const auto& r : rec.rows) CHECK(r.q25 <= r.median);
  }
  {
    auto c = small("point2line_clt");
    c.N_grid = {64};
    const auto rec = run_point2line_clt(c);
    CHECK(rec.rows[0].p == doctest::Approx(65.0 / 63.0));
    CHECK(rec.rows[0].sigma > 0.0);
    CHECK(rec.reference.mean < 0.0);
  }
  {
    auto c = small("ordering");
    c.N_grid = {20};
    c.replicas = 10;
    const auto rec = run_ordering(c);
    CHECK(rec.rows[0].samples == 10);
    CHECK(rec.rows[0].discarded == 0);
    CHECK(rec.rows[0].checked[0] > 0);
  }
  {
    auto c = small("endpoint_tightness");
    c.N_grid = {16, 32};
    const auto rec = run_endpoint_tightness(c);
    CHECK(rec.iqr_ratio1 >= 1.0);
    CHECK(rec.rows[0].L1[0] <= rec.rows[0].L1[2]);
  }
  {
    auto c = small("region_pass");
    c.N_grid = {27};
    c.M_grid = {0.25};
    const auto rec = run_region_pass(c);
    REQUIRE(rec.rows.size() == 2);
    for (const auto& r : rec.rows) {
      CHECK(r.T == 9);
      if (r.ess > 0.0) {
        CHECK(r.frequency >= 0.0);
        CHECK(r.frequency <= 1.0);
      }
    }
  }
  {
    auto c = small("gibbs_consistency");
    c.N_grid = {3};
    c.replicas = 1000;
    c.sweeps = 5;
    const auto rec = run_gibbs_consistency(c);
    CHECK(rec.max_ks.at(3) < 0.08);
    CHECK(rec.discarded.at(3) == 0);
  }
}
