#pragma once

#include <complex>

namespace hslg {

struct ThetaP {
  double theta = 1.0;
  double p = 1.0;
};

// Polygamma functions for real z > 0. Absolute error below 1e-12.
double digamma(double z);
double trigamma(double z);
double tetragamma(double z);

// log Gamma(z) for complex z with Re z > 0.
std::complex<double> lgamma_complex(std::complex<double> z);

// Psi'(theta)^2 / (-Psi''(theta))^{4/3}.
double nu_constant(double theta);

// Root of Psi'(x) = p Psi'(2 theta - x) on (0, 2 theta).
double theta_c_solve(const ThetaP& tp);

struct Point2LineConstants {
  double f = 0.0;
  double sigma = 0.0;
  double theta_c = 0.0;
};

// f = -Psi(theta_c) - p Psi(2 theta - theta_c),
// sigma^3 = (-Psi''(theta_c) - p Psi''(2 theta - theta_c)) / 2.
Point2LineConstants point2line_constants(const ThetaP& tp);

// (N-k) f + 2 N Psi(theta) - M^2 N^{1/3} Psi'(theta)^2 / Psi''(theta) with
// k = M N^{2/3}, p = (N+k)/(N-k). Bounded in N.
double parabola_remainder(double theta, double M, double N);

}  // namespace hslg
