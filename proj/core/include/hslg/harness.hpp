#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "hslg/polymer.hpp"
#include "hslg/stats.hpp"

namespace hslg {

// Experiment ids; replica r of experiment e draws its disorder from the key
// stream_key(seed, (e << 32) | r, N).
namespace exp_id {
constexpr std::uint64_t fluctuation = 0x464C, transversal = 0x5452, parabola = 0x5041, point2line = 0x5032,
                        ordering = 0x4F52, endpoint = 0x4550, region_pass = 0x5250, gibbs = 0x4743;
}

struct ExperimentConfig {
  std::string experiment;
  std::vector<int> N_grid{128, 256, 512, 1024, 2048};
  long replicas = 2000;
  double theta = 1.0;
  PolymerParams::AlphaRule alpha_rule = PolymerParams::AlphaRule::Fixed;
  double zeta = 1.0;  // alpha under the fixed rule
  double mu = 0.0;    // alpha = mu N^{-1/3} under the critical rule
  double r = 1.0;
  int T_factor = 8;   // T = T_factor * floor(N^{2/3})
  std::uint64_t seed = 20240611;
  int threads = 0;    // 0 = hardware concurrency
  std::string out;    // empty = stdout
  bool json = false;  // also write <out>.json

  // per-experiment knobs
  std::string disorder = "loggamma";  // or "constant" (variance-free guard field)
  std::vector<double> M_grid{0.5, 1.0, 2.0};
  std::vector<double> s_grid{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> delta_grid{0.05, 0.1, 0.2, 0.4};
  std::vector<int> p_grid{1, 2};
  int depth = 3;
  double slack_exponent = 7.0 / 6.0;
  double k_line = 1.0;
  int bootstrap = 1000;
  int sweeps = 50;
  double alpha_shift = 0.0;  // gibbs consistency: alpha used by the resampler is alpha + shift
  bool resample = true;

  double alpha(int N) const;
  int T(int N) const;
  PolymerParams polymer() const;
  void validate() const;
};

std::vector<std::string> experiment_names();
ExperimentConfig default_config(const std::string& experiment);

// Flat `key = value` text. Keys before the first [section] apply to every
// experiment; keys inside [name] only when name matches. '#' starts a comment,
// lists are comma separated.
void apply_config_text(ExperimentConfig& cfg, const std::string& text);
ExperimentConfig load_config(const std::string& path, const std::string& experiment);
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::vector<std::pair<std::string, std::string>> config_items(const ExperimentConfig& cfg);
std::string format_config(const ExperimentConfig& cfg);
// HSLG_SEED overrides the seed.
void apply_env_overrides(ExperimentConfig& cfg);

// Output table: provenance lines then typed columns.
class Table {
 public:
  using Cell = std::variant<long long, double, std::string>;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_meta(const std::string& key, const std::string& value) { meta.emplace_back(key, value); }
  void add_meta(const std::string& key, double value);
  void add_row(std::vector<Cell> row);
  void write_csv(std::ostream& os) const;
  void write_json(std::ostream& os) const;
};
std::string format_double(double x);

struct TwReference {
  double mean = 0.0, variance = 0.0, skewness = 0.0, excess_kurtosis = 0.0;
  std::string source;
};
std::string data_dir();
TwReference load_tw_reference(const std::string& path = "");

struct FluctuationRow {
  int N = 0;
  long replicas = 0;
  double mean = 0.0, sd = 0.0, sd_se = 0.0;
};
struct FluctuationRecord {
  std::vector<FluctuationRow> rows;
  LinearFit fit;   // log sd against log N
  Interval ci;     // bootstrap interval for the slope
  bool degenerate = false;  // some sd is zero, no fit
  Table table(const ExperimentConfig& cfg) const;
};
FluctuationRecord run_fluctuation_exponent(const ExperimentConfig& cfg);

struct TransversalRow {
  int N = 0;
  long replicas = 0;
  double var_diff = 0.0, var_se = 0.0;  // Var(F_N(s_max) - F_N(s_min))
};
struct ModulusRow {
  int N = 0;
  double delta = 0.0, mean_omega = 0.0;
};
struct TransversalRecord {
  std::vector<TransversalRow> rows;
  std::vector<ModulusRow> modulus;
  std::vector<double> ratios;  // var_diff(N_{k+1}) / var_diff(N_k)
  long monotone_failures = 0;  // paths where omega_delta decreased in delta
  Table table(const ExperimentConfig& cfg) const;
};
TransversalRecord run_transversal_scaling(const ExperimentConfig& cfg);

struct ParabolaRow {
  int N = 0;
  double M = 0.0, k = 0.0;
  long replicas = 0;
  double q25 = 0.0, median = 0.0, q75 = 0.0, mean = 0.0;  // of V_N(M) + M^2
};
struct ParabolaRecord {
  std::vector<ParabolaRow> rows;
  std::map<int, double> median_band;  // per N: max - min of medians over M
  long monotone_failures = 0;         // V_N(M) increasing in M on shared disorder
  Table table(const ExperimentConfig& cfg) const;
};
ParabolaRecord run_parabola(const ExperimentConfig& cfg);

struct Point2LineRow {
  int N = 0;
  double k = 0.0, p = 0.0, f = 0.0, sigma = 0.0, alpha = 0.0;
  long replicas = 0;
  double mean = 0.0, variance = 0.0, skewness = 0.0, excess_kurtosis = 0.0, mean_se = 0.0;
};
struct Point2LineRecord {
  std::vector<Point2LineRow> rows;
  TwReference reference;
  Table table(const ExperimentConfig& cfg) const;
};
Point2LineRecord run_point2line_clt(const ExperimentConfig& cfg);

struct OrderingRow {
  int N = 0, depth = 0;
  long samples = 0, discarded = 0;
  double slack = 0.0;
  std::array<long, 4> violations{}, checked{};
  std::array<double, 4> worst_excess{};
  long samples_with_violation = 0;
  double frequency() const;        // samples with any violation / samples
  double check_frequency() const;  // violations / checks
};
struct OrderingRecord {
  std::vector<OrderingRow> rows;
  Table table(const ExperimentConfig& cfg) const;
};
OrderingRecord run_ordering(const ExperimentConfig& cfg);

struct EndpointRow {
  int N = 0;
  long samples = 0, discarded = 0;
  std::array<double, 3> L1{}, L2{};  // quartiles of N^{-1/3} L_1(1), N^{-1/3} L_2(2)
  double iqr1() const { return L1[2] - L1[0]; }
  double iqr2() const { return L2[2] - L2[0]; }
};
struct EndpointRecord {
  std::vector<EndpointRow> rows;
  double iqr_ratio1 = 0.0, iqr_ratio2 = 0.0;  // max / min over N
  Table table(const ExperimentConfig& cfg) const;
};
EndpointRecord run_endpoint_tightness(const ExperimentConfig& cfg);

struct RegionPassRow {
  int N = 0, p = 0, T = 0;
  double M = 0.0, r = 0.0, alpha = 0.0;
  long samples = 0;
  double frequency = 0.0, se = 0.0, ess = 0.0;
};
struct RegionPassRecord {
  std::vector<RegionPassRow> rows;
  Table table(const ExperimentConfig& cfg) const;
};
RegionPassRecord run_region_pass(const ExperimentConfig& cfg);

struct GibbsSiteRow {
  int N = 0, i = 0, j = 0;
  double ks = 0.0, direct_mean = 0.0, resampled_mean = 0.0;
};
struct GibbsConsistencyRecord {
  std::vector<GibbsSiteRow> rows;
  std::map<int, double> max_ks;  // per N
  std::map<int, long> discarded;
  Table table(const ExperimentConfig& cfg) const;
};
GibbsConsistencyRecord run_gibbs_consistency(const ExperimentConfig& cfg);

// Dispatch by cfg.experiment; the table carries the config in its header.
Table run_experiment(const ExperimentConfig& cfg);
// Writes CSV to cfg.out (stdout when empty) and the JSON mirror when asked.
void write_outputs(const Table& t, const ExperimentConfig& cfg);

}  // namespace hslg
