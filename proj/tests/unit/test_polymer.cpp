#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "doctest.h"
#include "hslg/polymer.hpp"
#include "hslg/specfun.hpp"
#include "hslg/stats.hpp"

using namespace hslg;

namespace {

constexpr double ninf = -std::numeric_limits<double>::infinity();

// Independent enumeration: every up/right lattice path from (1,1) to (m,n)
// staying in j <= i, aggregated in long double.
void enumerate(const LogWeightField& f, int i, int j, int m, int n, long double acc, std::vector<long double>& out) {
  acc += f.log_weight(i, j);
  if (i == m && j == n) {
    out.push_back(acc);
    return;
  }
  if (i < m) enumerate(f, i + 1, j, m, n, acc, out);
  if (j < n && j + 1 <= i) enumerate(f, i, j + 1, m, n, acc, out);
}

double oracle_logZ(const LogWeightField& f, int m, int n) {
  std::vector<long double> terms;
  enumerate(f, 1, 1, m, n, 0.0L, terms);
  long double mx = terms.front();
  for (auto t : terms) mx = std::max(mx, t);
  long double s = 0.0L;
  for (auto t : terms) s += std::exp(t - mx);
  return static_cast<double>(mx + std::log(s));
}

std::uint64_t catalan(int n) {
  std::uint64_t c = 1;
  for (int k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
  return c;
}

}  // namespace

TEST_CASE("unique path at (2,2)") {
  const auto f = gen_weights(4, PolymerParams::homogeneous(1.0, 1.0), 5);
  const double expect = f.log_weight(1, 1) + f.log_weight(2, 1) + f.log_weight(2, 2);
  CHECK(std::abs(logZ_point(f, 2, 2) - expect) < 1e-14);
}

TEST_CASE("unit weights count Catalan paths") {
  for (int N = 1; N <= 10; ++N) {
    const auto f = LogWeightField::constant(N, 0.0);
    const double lz = logZ_point(f, N, N);
    CHECK(std::abs(lz - std::log(static_cast<double>(catalan(N - 1)))) < 1e-12);
    CHECK(std::llround(std::exp(lz)) == static_cast<long long>(catalan(N - 1)));
  }
  CHECK(std::abs(brute_force_logZ(LogWeightField::constant(3, 0.0), 3, 3) - std::log(2.0)) < 1e-14);
  const auto g = gen_weights(3, PolymerParams::homogeneous(1.0, 0.5), 1);
  CHECK(brute_force_logZ(g, 1, 1) == g.log_weight(1, 1));
}

TEST_CASE("DP against enumeration on random fields") {
  for (int s = 0; s < 100; ++s) {
    const double th = 0.5 + 0.05 * (s % 30), al = -0.3 + 0.04 * (s % 20);
    const auto f = gen_weights(7, PolymerParams::homogeneous(th, al), 1000 + s);
    for (int m = 1; m <= 13; ++m) {
      for (int n = 1; n <= std::min(m, 14 - m); ++n) {
        const double dp = logZ_point(f, m, n);
        CHECK(std::abs(dp - oracle_logZ(f, m, n)) <= 1e-10 * std::max(1.0, std::abs(dp)));
        if (s < 10) CHECK(std::abs(dp - brute_force_logZ(f, m, n)) <= 1e-10 * std::max(1.0, std::abs(dp)));
      }
    }
  }
  const auto big = gen_weights(12, PolymerParams::homogeneous(1.0, 1.0), 3);
  CHECK_THROWS_AS(brute_force_logZ(big, 12, 11), RefusalError);
  CHECK_THROWS_AS(logZ_point(big, 3, 4), DomainError);
}

TEST_CASE("weights are deterministic and have the right log-means") {
  const auto p = PolymerParams::homogeneous(1.0, 0.5);
  const auto a = gen_weights(300, p, 77), b = gen_weights(300, p, 77);
  CHECK(a.raw() == b.raw());
  const WeightGenerator gen(300, p, stream_key(77, 0, 300));
  CHECK(gen.log_weight(17, 4) == a.log_weight(17, 4));
  CHECK(gen_weights(300, p, 78).raw() != a.raw());

  std::vector<double> off, diag;
  for (int i = 1; i <= 600; ++i)
    for (int j = 1; j <= i; ++j) (i == j ? diag : off).push_back(a.log_weight(i, j));
  // log W = -log Gamma(shape), E log Gamma(b) = Psi(b)
  const double se_off = std::sqrt(variance(off) / off.size()), se_diag = std::sqrt(variance(diag) / diag.size());
  CHECK(std::abs(mean(off) + boost::math::digamma(2.0)) < 3 * se_off);
  CHECK(std::abs(mean(diag) + boost::math::digamma(1.5)) < 3 * se_diag);

  CHECK_THROWS_AS(gen_weights(5, PolymerParams::homogeneous(1.0, -1.0), 1), DomainError);
  auto crit = PolymerParams::homogeneous(1.0, 0.0);
  crit.rule = PolymerParams::AlphaRule::Critical;
  crit.mu = -8.0;
  CHECK_THROWS_AS(gen_weights(8, crit, 1), DomainError);  // alpha = -4
}

TEST_CASE("point-to-line sums") {
  const int N = 40;
  const auto f = gen_weights(N, PolymerParams::homogeneous(1.0, 1.0), 9);
  const auto anti = logZ_antidiagonal(f, N, N - 1);
  for (int k = 0; k < N; ++k) CHECK(std::abs(anti[k] - logZ_point(f, N + k, N - k)) < 1e-11 * std::abs(anti[k]));
  double prev = std::numeric_limits<double>::infinity();
  for (double k = 0.0; k <= N; k += 0.5) {
    const double v = logZ_line(f, k, N);
    CHECK(v <= prev);
    prev = v;
    // re-summation in long double
    long double mx = -1e300L, s = 0.0L;
    const int kc = static_cast<int>(std::ceil(k));
    for (int j = kc; j <= N - 1; ++j) mx = std::max<long double>(mx, anti[j]);
    for (int j = kc; j <= N - 1; ++j) s += std::exp(static_cast<long double>(anti[j]) - mx);
    if (kc <= N - 1) {
      CHECK(std::abs(v - static_cast<double>(mx + std::log(s))) < 1e-9);
      for (int j = kc; j <= N - 1; ++j) CHECK(v >= anti[j]);
    } else {
      CHECK(v == ninf);
    }
  }
  CHECK(std::abs(logZ_line(f, N - 1, N) - logZ_point(f, 2 * N - 1, 1)) < 1e-12);
  CHECK_THROWS_AS(logZ_line(f, N + 1, N), DomainError);
}

TEST_CASE("free energy process") {
  const int N = 64;
  const double th = 1.0, al = 1.0;
  const auto f = gen_weights(N, PolymerParams::homogeneous(th, al), 21);
  const std::vector<double> grid{0.0, 0.25, 0.5, 1.0};
  const auto F = free_energy_process(f, N, th, al, 1.0, grid);
  const double scale = std::cbrt(static_cast<double>(N));
  CHECK(std::abs(F.values[0] - (logZ_point(f, N, N) + 2 * N * digamma(th)) / scale) < 1e-12);
  for (std::size_t k = 0; k + 1 < F.lattice_s.size(); ++k) {
    const double mid = 0.5 * (F.lattice_s[k] + F.lattice_s[k + 1]);
    CHECK(std::abs(F.at(mid) - 0.5 * (F.lattice_F[k] + F.lattice_F[k + 1])) < 1e-12);
  }
  const int k = 5;
  CHECK(std::abs(F.lattice_F[k] - (logZ_point(f, N + k, N - k) + 2 * N * digamma(th)) / scale) < 1e-12);
  const auto again = free_energy_process(gen_weights(N, PolymerParams::homogeneous(th, al), 21), N, th, al, 1.0, grid);
  CHECK(again.values == F.values);
  CHECK_THROWS_AS(free_energy_process(f, N, th, al, 1.0, {1.5}), DomainError);
  CHECK_THROWS_AS(free_energy_process(f, N, th, al, 5.0, {0.0}), DomainError);
}
