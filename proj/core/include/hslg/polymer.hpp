#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "hslg/errors.hpp"
#include "hslg/rng.hpp"

namespace hslg {

inline double logsumexp(double a, double b) {
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  if (a == ninf) return b;
  if (b == ninf) return a;
  return std::max(a, b) + std::log1p(std::exp(-std::abs(a - b)));
}

struct PolymerParams {
  enum class AlphaRule { Fixed, Critical };

  std::vector<double> theta_vec{1.0};  // one entry means homogeneous
  double alpha = 1.0;                  // used when rule == Fixed (zeta)
  AlphaRule rule = AlphaRule::Fixed;
  double mu = 0.0;                     // used when rule == Critical

  static PolymerParams homogeneous(double theta, double alpha) {
    PolymerParams p;
    p.theta_vec = {theta};
    p.alpha = alpha;
    return p;
  }
  double theta(int i) const {
    return theta_vec.size() == 1 ? theta_vec[0] : theta_vec.at(static_cast<std::size_t>(i - 1));
  }
  bool homogeneous_theta() const { return theta_vec.size() == 1; }
  double alpha_at(int N) const {
    return rule == AlphaRule::Fixed ? alpha : mu * std::pow(static_cast<double>(N), -1.0 / 3.0);
  }
  void validate(int N) const;
};

// Weight W_{i,j}, j <= i, as a pure function of (key, i, j): the (i,j) site
// owns the Philox substream (i << 32) | j.
class WeightGenerator {
 public:
  WeightGenerator(int N, const PolymerParams& params, std::uint64_t key);
  double log_weight(int i, int j) const;
  int N() const { return N_; }
  double alpha() const { return alpha_; }

 private:
  int N_;
  PolymerParams params_;
  double alpha_;
  std::uint64_t key_;
};

// Materialized log-weights on {j <= i <= imax}.
class LogWeightField {
 public:
  LogWeightField() = default;
  LogWeightField(int N, const PolymerParams& params, std::uint64_t seed, std::uint64_t stream = 0);
  static LogWeightField from_function(int N, int imax, const std::function<double(int, int)>& fn);
  static LogWeightField constant(int N, double log_value);

  int N() const { return N_; }
  int imax() const { return imax_; }
  std::uint64_t seed() const { return seed_; }
  bool contains(int i, int j) const { return j >= 1 && j <= i && i <= imax_; }
  double log_weight(int i, int j) const {
    return values_[static_cast<std::size_t>(i) * (i - 1) / 2 + (j - 1)];
  }
  void set_log_weight(int i, int j, double v) {
    values_[static_cast<std::size_t>(i) * (i - 1) / 2 + (j - 1)] = v;
  }
  const std::vector<double>& raw() const { return values_; }

 private:
  int N_ = 0;
  int imax_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> values_;
};

LogWeightField gen_weights(int N, const PolymerParams& params, std::uint64_t seed,
                           std::uint64_t stream = 0);

// log Z(m, n) by a single rolling-row pass over the half-quadrant.
template <class Src>
double logZ_point(const Src& src, int m, int n) {
  if (n < 1 || n > m) throw DomainError("logZ_point: target outside the half-quadrant");
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> row(static_cast<std::size_t>(n) + 1, ninf);
  for (int i = 1; i <= m; ++i) {
    const int jm = std::min(i, n);
    for (int j = 1; j <= jm; ++j) {
      const double up = (j <= i - 1) ? row[j] : ninf;  // Z(i-1, j)
      const double left = row[j - 1];                  // Z(i, j-1), already updated
      const double acc = (i == 1 && j == 1) ? 0.0 : logsumexp(up, left);
      row[j] = src.log_weight(i, j) + acc;
    }
    row[0] = ninf;
  }
  return row[n];
}

// Values log Z(N+k, N-k) for k = 0..kmax in one pass (entries with i+j > 2N
// are never visited).
template <class Src>
std::vector<double> logZ_antidiagonal(const Src& src, int N, int kmax) {
  if (kmax < 0 || kmax > N - 1) throw DomainError("logZ_antidiagonal: need 0 <= kmax <= N-1");
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> row(static_cast<std::size_t>(N) + 1, ninf);
  std::vector<double> out(static_cast<std::size_t>(kmax) + 1, ninf);
  for (int i = 1; i <= N + kmax; ++i) {
    const int jm = std::min(i, 2 * N - i);
    for (int j = 1; j <= jm; ++j) {
      const double up = (j <= i - 1) ? row[j] : ninf;
      const double left = row[j - 1];
      const double acc = (i == 1 && j == 1) ? 0.0 : logsumexp(up, left);
      row[j] = src.log_weight(i, j) + acc;
    }
    if (i >= N) out[static_cast<std::size_t>(i - N)] = row[2 * N - i];
  }
  return out;
}

// log of sum_{j = ceil(k)}^{N} Z(N+j, N-j); the j = N term (2N, 0) lies
// outside the half-quadrant and contributes zero.
double logZ_line_from_antidiagonal(const std::vector<double>& anti, int N, double k);

template <class Src>
double logZ_line(const Src& src, double k, int N) {
  if (k > N) throw DomainError("logZ_line: k > N");
  const int kc = std::max(0, static_cast<int>(std::ceil(k)));
  if (kc >= N) return -std::numeric_limits<double>::infinity();
  return logZ_line_from_antidiagonal(logZ_antidiagonal(src, N, N - 1), N, k);
}

// Exhaustive path enumeration (oracle); refuses m + n > 22.
double brute_force_logZ(const LogWeightField& field, int m, int n);

struct FreeEnergyProcess {
  int N = 0;
  double alpha = 0.0;
  double theta = 1.0;
  std::vector<double> lattice_s;   // k / N^{2/3}
  std::vector<double> lattice_F;
  std::vector<double> grid;        // requested s-values
  std::vector<double> values;      // F at grid
  double at(double s) const;       // linear interpolation on the lattice
};

FreeEnergyProcess free_energy_process_from_antidiagonal(const std::vector<double>& anti, int N,
                                                        double theta, double alpha, double r,
                                                        const std::vector<double>& grid);

template <class Src>
FreeEnergyProcess free_energy_process(const Src& src, int N, double theta, double alpha, double r,
                                      const std::vector<double>& grid) {
  if (N < 3 || static_cast<double>(N) < r * r * r) throw DomainError("free_energy_process: need N >= max(3, r^3)");
  const double scale = std::pow(static_cast<double>(N), 2.0 / 3.0);
  const int kmax = std::min(N - 1, static_cast<int>(std::ceil(r * scale)));
  return free_energy_process_from_antidiagonal(logZ_antidiagonal(src, N, kmax), N, theta, alpha, r, grid);
}

}  // namespace hslg
