#include "hslg/polymer.hpp"

#include <algorithm>

#include "hslg/dist.hpp"
#include "hslg/specfun.hpp"

namespace hslg {

void PolymerParams::validate(int N) const {
  if (theta_vec.empty()) throw DomainError("PolymerParams: empty theta vector");
  for (double t : theta_vec)
    if (!(t > 0.0)) throw DomainError("PolymerParams: theta must be positive");
  const double a = alpha_at(N);
  const int n = homogeneous_theta() ? 1 : std::min<int>(static_cast<int>(theta_vec.size()), 2 * N);
  for (int j = 1; j <= n; ++j)
    if (!(a + theta(j) > 0.0)) throw DomainError("PolymerParams: alpha + theta_j must be positive");
  if (!homogeneous_theta() && static_cast<int>(theta_vec.size()) < 2 * N)
    throw DomainError("PolymerParams: theta vector shorter than 2N");
}

WeightGenerator::WeightGenerator(int N, const PolymerParams& params, std::uint64_t key)
    : N_(N), params_(params), alpha_(params.alpha_at(N)), key_(key) {
  if (N < 1) throw DomainError("WeightGenerator: N must be positive");
  params_.validate(N);
}

double WeightGenerator::log_weight(int i, int j) const {
  Rng rng(key_, (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j));
  const double shape = (i == j) ? alpha_ + params_.theta(j) : params_.theta(i) + params_.theta(j);
  return -log_gamma_variate(shape, rng);
}

LogWeightField::LogWeightField(int N, const PolymerParams& params, std::uint64_t seed, std::uint64_t stream)
    : N_(N), imax_(2 * N), seed_(seed) {
  const WeightGenerator gen(N, params, stream_key(seed, stream, static_cast<std::uint64_t>(N)));
  values_.resize(static_cast<std::size_t>(imax_) * (imax_ + 1) / 2);
  for (int i = 1; i <= imax_; ++i)
    for (int j = 1; j <= i; ++j) set_log_weight(i, j, gen.log_weight(i, j));
}

LogWeightField LogWeightField::from_function(int N, int imax, const std::function<double(int, int)>& fn) {
  LogWeightField f;
  f.N_ = N;
  f.imax_ = imax;
  f.values_.resize(static_cast<std::size_t>(imax) * (imax + 1) / 2);
  for (int i = 1; i <= imax; ++i)
    for (int j = 1; j <= i; ++j) f.set_log_weight(i, j, fn(i, j));
  return f;
}

LogWeightField LogWeightField::constant(int N, double log_value) {
  return from_function(N, 2 * N, [log_value](int, int) { return log_value; });
}

LogWeightField gen_weights(int N, const PolymerParams& params, std::uint64_t seed, std::uint64_t stream) {
  return LogWeightField(N, params, seed, stream);
}

double logZ_line_from_antidiagonal(const std::vector<double>& anti, int N, double k) {
  if (k > N) throw DomainError("logZ_line: k > N");
  const int kc = std::max(0, static_cast<int>(std::ceil(k)));
  double acc = -std::numeric_limits<double>::infinity();
  const int top = std::min<int>(N - 1, static_cast<int>(anti.size()) - 1);
  for (int j = kc; j <= top; ++j) acc = logsumexp(acc, anti[static_cast<std::size_t>(j)]);
  return acc;
}

namespace {

struct Enumerator {
  const LogWeightField& f;
  int m, n;
  double acc = -std::numeric_limits<double>::infinity();
  void walk(int i, int j, double lw) {
    lw += f.log_weight(i, j);
    if (i == m && j == n) {
      acc = logsumexp(acc, lw);
      return;
    }
    if (i < m) walk(i + 1, j, lw);
    if (j < n && j + 1 <= i) walk(i, j + 1, lw);
  }
};

}  // namespace

double brute_force_logZ(const LogWeightField& field, int m, int n) {
  if (m + n > 22) throw RefusalError("brute_force_logZ: enumeration budget is m + n <= 22");
  if (n < 1 || n > m || !field.contains(m, n)) throw DomainError("brute_force_logZ: target outside field");
  Enumerator e{field, m, n};
  e.walk(1, 1, 0.0);
  return e.acc;
}

double FreeEnergyProcess::at(double s) const {
  if (lattice_s.empty()) throw DomainError("FreeEnergyProcess: empty");
  if (s < lattice_s.front() || s > lattice_s.back() + 1e-12) throw DomainError("FreeEnergyProcess: s outside lattice");
  const auto it = std::upper_bound(lattice_s.begin(), lattice_s.end(), s);
  if (it == lattice_s.end()) return lattice_F.back();
  const std::size_t k = static_cast<std::size_t>(it - lattice_s.begin());
  const double w = (s - lattice_s[k - 1]) / (lattice_s[k] - lattice_s[k - 1]);
  return (1.0 - w) * lattice_F[k - 1] + w * lattice_F[k];
}

FreeEnergyProcess free_energy_process_from_antidiagonal(const std::vector<double>& anti, int N, double theta,
                                                        double alpha, double r, const std::vector<double>& grid) {
  FreeEnergyProcess p;
  p.N = N;
  p.alpha = alpha;
  p.theta = theta;
  const double scale = std::pow(static_cast<double>(N), 2.0 / 3.0);
  const double centre = 2.0 * N * digamma(theta);
  const double norm = std::cbrt(static_cast<double>(N));
  for (std::size_t k = 0; k < anti.size(); ++k) {
    p.lattice_s.push_back(static_cast<double>(k) / scale);
    p.lattice_F.push_back((anti[k] + centre) / norm);
  }
  for (double s : grid) {
    if (s < 0.0 || s > r) throw DomainError("free_energy_process: grid outside [0, r]");
    p.grid.push_back(s);
    p.values.push_back(p.at(s));
  }
  return p;
}

}  // namespace hslg
