#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hslg/errors.hpp"
#include "hslg/harness.hpp"

#ifndef HSLG_SOURCE_DATA_DIR
#define HSLG_SOURCE_DATA_DIR ""
#endif
#ifndef HSLG_INSTALL_DATA_DIR
#define HSLG_INSTALL_DATA_DIR ""
#endif

namespace hslg {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0') throw DomainError("config: '" + key + "' expects a number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto* b = v.data();
  const auto* e = v.data() + v.size();
  int base = 10;
  if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) {
    b += 2;
    base = 16;
  }
  auto [p, ec] = std::from_chars(b, e, x, base);
  if (ec != std::errc() || p != e) throw DomainError("config: '" + key + "' expects an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw DomainError("config: '" + key + "' expects a boolean, got '" + v + "'");
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ", ";
    if constexpr (std::is_same_v<T, double>)
      s += format_double(v[k]);
    else
      s += std::to_string(v[k]);
  }
  return s;
}

struct Key {
  std::string name;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

const std::vector<Key>& keys() {
  using C = ExperimentConfig;
  static const std::vector<Key> k = {
      {"experiment", [](const C& c) { return c.experiment; }, [](C& c, const std::string& v) { c.experiment = v; }},
      {"N", [](const C& c) { return join(c.N_grid); },
       [](C& c, const std::string& v) {
         c.N_grid.clear();
         for (auto& s : split_list(v)) c.N_grid.push_back(static_cast<int>(to_int("N", s)));
       }},
      {"replicas", [](const C& c) { return std::to_string(c.replicas); },
       [](C& c, const std::string& v) { c.replicas = static_cast<long>(to_int("replicas", v)); }},
      {"theta", [](const C& c) { return format_double(c.theta); }, [](C& c, const std::string& v) { c.theta = to_double("theta", v); }},
      {"alpha_rule",
       [](const C& c) { return std::string(c.alpha_rule == PolymerParams::AlphaRule::Fixed ? "fixed" : "critical"); },
       [](C& c, const std::string& v) {
         if (v == "fixed")
           c.alpha_rule = PolymerParams::AlphaRule::Fixed;
         else if (v == "critical")
           c.alpha_rule = PolymerParams::AlphaRule::Critical;
         else
           throw DomainError("config: alpha_rule must be fixed or critical");
       }},
      {"zeta", [](const C& c) { return format_double(c.zeta); }, [](C& c, const std::string& v) { c.zeta = to_double("zeta", v); }},
      {"mu", [](const C& c) { return format_double(c.mu); }, [](C& c, const std::string& v) { c.mu = to_double("mu", v); }},
      {"r", [](const C& c) { return format_double(c.r); }, [](C& c, const std::string& v) { c.r = to_double("r", v); }},
      {"T_factor", [](const C& c) { return std::to_string(c.T_factor); },
       [](C& c, const std::string& v) { c.T_factor = static_cast<int>(to_int("T_factor", v)); }},
      {"seed", [](const C& c) { return std::to_string(c.seed); },
       [](C& c, const std::string& v) { c.seed = static_cast<std::uint64_t>(to_int("seed", v)); }},
      {"threads", [](const C& c) { return std::to_string(c.threads); },
       [](C& c, const std::string& v) { c.threads = static_cast<int>(to_int("threads", v)); }},
      {"out", [](const C& c) { return c.out; }, [](C& c, const std::string& v) { c.out = v; }},
      {"json", [](const C& c) { return std::string(c.json ? "true" : "false"); },
       [](C& c, const std::string& v) { c.json = to_bool("json", v); }},
      {"disorder", [](const C& c) { return c.disorder; },
       [](C& c, const std::string& v) {
         if (v != "loggamma" && v != "constant") throw DomainError("config: disorder must be loggamma or constant");
         c.disorder = v;
       }},
      {"M", [](const C& c) { return join(c.M_grid); },
       [](C& c, const std::string& v) {
         c.M_grid.clear();
         for (auto& s : split_list(v)) c.M_grid.push_back(to_double("M", s));
       }},
      {"s_grid", [](const C& c) { return join(c.s_grid); },
       [](C& c, const std::string& v) {
         c.s_grid.clear();
         for (auto& s : split_list(v)) c.s_grid.push_back(to_double("s_grid", s));
       }},
      {"delta", [](const C& c) { return join(c.delta_grid); },
       [](C& c, const std::string& v) {
         c.delta_grid.clear();
         for (auto& s : split_list(v)) c.delta_grid.push_back(to_double("delta", s));
       }},
      {"p", [](const C& c) { return join(c.p_grid); },
       [](C& c, const std::string& v) {
         c.p_grid.clear();
         for (auto& s : split_list(v)) c.p_grid.push_back(static_cast<int>(to_int("p", s)));
       }},
      {"depth", [](const C& c) { return std::to_string(c.depth); },
       [](C& c, const std::string& v) { c.depth = static_cast<int>(to_int("depth", v)); }},
      {"slack_exponent", [](const C& c) { return format_double(c.slack_exponent); },
       [](C& c, const std::string& v) { c.slack_exponent = to_double("slack_exponent", v); }},
      {"k_line", [](const C& c) { return format_double(c.k_line); },
       [](C& c, const std::string& v) { c.k_line = to_double("k_line", v); }},
      {"bootstrap", [](const C& c) { return std::to_string(c.bootstrap); },
       [](C& c, const std::string& v) { c.bootstrap = static_cast<int>(to_int("bootstrap", v)); }},
      {"sweeps", [](const C& c) { return std::to_string(c.sweeps); },
       [](C& c, const std::string& v) { c.sweeps = static_cast<int>(to_int("sweeps", v)); }},
      {"alpha_shift", [](const C& c) { return format_double(c.alpha_shift); },
       [](C& c, const std::string& v) { c.alpha_shift = to_double("alpha_shift", v); }},
      {"resample", [](const C& c) { return std::string(c.resample ? "true" : "false"); },
       [](C& c, const std::string& v) { c.resample = to_bool("resample", v); }},
  };
  return k;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double ExperimentConfig::alpha(int N) const { return polymer().alpha_at(N); }

int ExperimentConfig::T(int N) const {
  return T_factor * static_cast<int>(std::floor(std::pow(static_cast<double>(N), 2.0 / 3.0) + 1e-9));
}

PolymerParams ExperimentConfig::polymer() const {
  PolymerParams p = PolymerParams::homogeneous(theta, zeta);
  p.rule = alpha_rule;
  p.mu = mu;
  return p;
}

void ExperimentConfig::validate() const {
  if (N_grid.empty()) throw DomainError("config: empty N grid");
  if (replicas < 1) throw DomainError("config: replicas must be positive");
  if (!(theta > 0.0)) throw DomainError("config: theta must be positive");
  if (!(r > 0.0)) throw DomainError("config: r must be positive");
  if (M_grid.empty() || s_grid.empty() || delta_grid.empty() || p_grid.empty())
    throw DomainError("config: grids must be non-empty");
  const double nmin = std::max(3.0, r * r * r);
  for (int N : N_grid)
    if (static_cast<double>(N) < nmin) throw DomainError("config: need N >= max(3, r^3)");
  for (int N : N_grid) polymer().validate(N);
}

std::vector<std::string> experiment_names() {
  return {"fluctuation_exponent", "transversal_scaling", "parabola",        "point2line_clt",
          "ordering",             "endpoint_tightness",  "region_pass",     "gibbs_consistency"};
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "fluctuation_exponent") {
    c.N_grid = {128, 256, 512, 1024, 2048};
    c.replicas = 2000;
  } else if (experiment == "transversal_scaling") {
    c.N_grid = {256, 1024};
    c.replicas = 1000;
  } else if (experiment == "parabola") {
    c.N_grid = {1024};
    c.replicas = 1000;
  } else if (experiment == "point2line_clt") {
    c.N_grid = {1024};
    c.replicas = 2000;
  } else if (experiment == "ordering") {
    c.N_grid = {200};
    c.replicas = 1000;
  } else if (experiment == "endpoint_tightness") {
    c.N_grid = {128, 512};
    c.replicas = 1000;
  } else if (experiment == "region_pass") {
    c.N_grid = {128, 512};
    c.replicas = 2000;
    c.M_grid = {0.25, 0.5};
  } else if (experiment == "gibbs_consistency") {
    c.N_grid = {3, 4};
    c.replicas = 100000;
  } else {
    throw DomainError("unknown experiment '" + experiment + "'");
  }
  return c;
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  for (const Key& k : keys()) {
    if (k.name == key) {
      k.set(cfg, value);
      return;
    }
  }
  throw DomainError("config: unknown key '" + key + "'");
}

void apply_config_text(ExperimentConfig& cfg, const std::string& text) {
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw DomainError("config line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DomainError("config line " + std::to_string(lineno) + ": expected key = value");
    if (!section.empty() && section != cfg.experiment) continue;
    const std::string key = trim(line.substr(0, eq));
    if (key == "experiment") continue;
    set_config_value(cfg, key, trim(line.substr(eq + 1)));
  }
}

ExperimentConfig load_config(const std::string& path, const std::string& experiment) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg = default_config(experiment);
  apply_config_text(cfg, ss.str());
  return cfg;
}

std::vector<std::pair<std::string, std::string>> config_items(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Key& k : keys()) out.emplace_back(k.name, k.get(cfg));
  return out;
}

std::string format_config(const ExperimentConfig& cfg) {
  std::string s = "[" + cfg.experiment + "]\n";
  for (const auto& [k, v] : config_items(cfg))
    if (k != "experiment") s += k + " = " + v + "\n";
  return s;
}

void apply_env_overrides(ExperimentConfig& cfg) {
  if (const char* s = std::getenv("HSLG_SEED"); s && *s) cfg.seed = static_cast<std::uint64_t>(to_int("HSLG_SEED", s));
}

void Table::add_meta(const std::string& key, double value) { meta.emplace_back(key, format_double(value)); }

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw DomainError("Table: row width does not match the columns");
  rows.push_back(std::move(row));
}

namespace {
std::string cell_text(const Table::Cell& c) {
  if (auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (auto* d = std::get_if<double>(&c)) return format_double(*d);
  return std::get<std::string>(c);
}
}  // namespace

void Table::write_csv(std::ostream& os) const {
  for (const auto& [k, v] : meta) os << "# " << k << ": " << v << "\n";
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << cell_text(row[c]);
    os << "\n";
  }
}

void Table::write_json(std::ostream& os) const {
  nlohmann::ordered_json j;
  j["meta"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : meta) j["meta"][k] = v;
  j["columns"] = columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& c : row) {
      if (auto* i = std::get_if<long long>(&c))
        r.push_back(*i);
      else if (auto* d = std::get_if<double>(&c))
        r.push_back(std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(format_double(*d)));
      else
        r.push_back(std::get<std::string>(c));
    }
    j["rows"].push_back(r);
  }
  os << j.dump(2) << "\n";
}

std::string data_dir() {
  namespace fs = std::filesystem;
  for (const char* d : {HSLG_SOURCE_DATA_DIR, HSLG_INSTALL_DATA_DIR})
    if (*d && fs::exists(fs::path(d) / "tw_gue.json")) return d;
  throw DomainError("data directory with tw_gue.json not found");
}

TwReference load_tw_reference(const std::string& path) {
  const std::string p = path.empty() ? data_dir() + "/tw_gue.json" : path;
  std::ifstream in(p);
  if (!in) throw DomainError("cannot open '" + p + "'");
  const auto j = nlohmann::json::parse(in);
  TwReference t;
  t.mean = j.at("mean").get<double>();
  t.variance = j.at("variance").get<double>();
  t.skewness = j.at("skewness").get<double>();
  t.excess_kurtosis = j.at("excess_kurtosis").get<double>();
  t.source = j.value("source", "");
  return t;
}

void write_outputs(const Table& t, const ExperimentConfig& cfg) {
  if (cfg.out.empty()) {
    t.write_csv(std::cout);
  } else {
    std::ofstream os(cfg.out);
    if (!os) throw DomainError("cannot write '" + cfg.out + "'");
    t.write_csv(os);
  }
  if (cfg.json) {
    if (cfg.out.empty()) {
      t.write_json(std::cout);
    } else {
      std::ofstream js(cfg.out + ".json");
      t.write_json(js);
    }
  }
}

}  // namespace hslg
