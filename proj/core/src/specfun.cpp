#include "hslg/specfun.hpp"

#include <cmath>
#include <numbers>

#include "hslg/errors.hpp"

namespace hslg {
namespace {

constexpr double kShift = 10.0;

void require_positive(double z, const char* what) {
  if (!(z > 0.0)) throw DomainError(std::string(what) + ": argument must be positive");
}

}  // namespace

double digamma(double z) {
  require_positive(z, "digamma");
  double acc = 0.0;
  while (z < kShift) {
    acc -= 1.0 / z;
    z += 1.0;
  }
  const double r = 1.0 / (z * z);
  // -sum B_{2k} / (2k z^{2k}), k = 1..7
  const double series =
      r * (-1.0 / 12 +
           r * (1.0 / 120 +
                r * (-1.0 / 252 +
                     r * (1.0 / 240 + r * (-1.0 / 132 + r * (691.0 / 32760 + r * (-1.0 / 12)))))));
  return acc + std::log(z) - 0.5 / z + series;
}

double trigamma(double z) {
  require_positive(z, "trigamma");
  double acc = 0.0;
  while (z < kShift) {
    acc += 1.0 / (z * z);
    z += 1.0;
  }
  const double r = 1.0 / (z * z);
  const double series =
      r * (1.0 / 6 +
           r * (-1.0 / 30 +
                r * (1.0 / 42 +
                     r * (-1.0 / 30 + r * (5.0 / 66 + r * (-691.0 / 2730 + r * (7.0 / 6)))))));
  return acc + 1.0 / z + 0.5 * r + series / z;
}

double tetragamma(double z) {
  require_positive(z, "tetragamma");
  double acc = 0.0;
  while (z < kShift) {
    acc -= 2.0 / (z * z * z);
    z += 1.0;
  }
  const double r = 1.0 / (z * z);
  const double series =
      r * (-0.5 +
           r * (1.0 / 6 +
                r * (-1.0 / 6 +
                     r * (3.0 / 10 + r * (-5.0 / 6 + r * (691.0 / 210 + r * (-35.0 / 2)))))));
  return acc - r - r / z + series * r;
}

std::complex<double> lgamma_complex(std::complex<double> z) {
  if (!(z.real() > 0.0)) throw DomainError("lgamma_complex: requires Re z > 0");
  std::complex<double> acc = 0.0;
  while (std::abs(z) < kShift) {
    acc -= std::log(z);
    z += 1.0;
  }
  const std::complex<double> w = 1.0 / z;
  const std::complex<double> w2 = w * w;
  const std::complex<double> series =
      w * (1.0 / 12 +
           w2 * (-1.0 / 360 +
                 w2 * (1.0 / 1260 +
                       w2 * (-1.0 / 1680 +
                             w2 * (1.0 / 1188 + w2 * (-691.0 / 360360 + w2 * (1.0 / 156)))))));
  return acc + (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

double nu_constant(double theta) {
  require_positive(theta, "nu_constant");
  const double t1 = trigamma(theta);
  return t1 * t1 * std::pow(-tetragamma(theta), -4.0 / 3.0);
}

double theta_c_solve(const ThetaP& tp) {
  if (!(tp.theta > 0.0) || !(tp.p >= 1.0)) throw DomainError("theta_c_solve: need theta > 0, p >= 1");
  if (tp.p == 1.0) return tp.theta;
  const double two = 2.0 * tp.theta;
  auto g = [&](double x) { return trigamma(x) - tp.p * trigamma(two - x); };
  double lo = 0.0;
  double hi = two;
  // g(0+) = +inf and g(2 theta -) = -inf; start inside and widen toward the ends.
  double a = 0.5 * tp.theta;
  double b = 1.5 * tp.theta;
  for (int k = 0; k < 200 && g(a) <= 0.0; ++k) a *= 0.5;
  for (int k = 0; k < 200 && g(b) >= 0.0; ++k) b = two - 0.5 * (two - b);
  if (!(g(a) > 0.0) || !(g(b) < 0.0)) throw NumericalError("theta_c_solve: root not bracketed");
  lo = a;
  hi = b;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return std::abs(g(lo)) < std::abs(g(hi)) ? lo : hi;
}

Point2LineConstants point2line_constants(const ThetaP& tp) {
  Point2LineConstants out;
  out.theta_c = theta_c_solve(tp);
  const double other = 2.0 * tp.theta - out.theta_c;
  out.f = -digamma(out.theta_c) - tp.p * digamma(other);
  out.sigma = std::cbrt(0.5 * (-tetragamma(out.theta_c) - tp.p * tetragamma(other)));
  return out;
}

double parabola_remainder(double theta, double M, double N) {
  const double k = M * std::pow(N, 2.0 / 3.0);
  if (!(k < N)) throw DomainError("parabola_remainder: need M N^{2/3} < N");
  const auto c = point2line_constants({theta, (N + k) / (N - k)});
  const double t1 = trigamma(theta);
  return (N - k) * c.f + 2.0 * N * digamma(theta) - M * M * std::cbrt(N) * t1 * t1 / tetragamma(theta);
}

}  // namespace hslg
