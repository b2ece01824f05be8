#pragma once

#include <array>
#include <vector>

#include "hslg/polymer.hpp"

namespace hslg {

// Symmetrized log-weights on {i + j <= 2N + 1}: W~_{i,j} = W_{max,min}, halved on
// the diagonal.
class SymWeightField {
 public:
  SymWeightField() = default;
  SymWeightField(int N, std::vector<double> lower);  // lower[(i)(i-1)/2 + j-1], j <= i, i+j <= 2N+1
  int N() const { return N_; }
  bool contains(int i, int j) const { return i >= 1 && j >= 1 && i + j <= 2 * N_ + 1; }
  double log_weight(int i, int j) const {
    if (i < j) std::swap(i, j);
    return lower_[static_cast<std::size_t>(i) * (i - 1) / 2 + (j - 1)];
  }

 private:
  int N_ = 0;
  std::vector<double> lower_;
};

SymWeightField symmetrize(const LogWeightField& field);

// log Z_sym^{(r)}(m, n). r = 0 gives 0, r = 1 a log-space DP over the quadrant,
// r >= 2 the Lindstrom-Gessel-Viennot determinant of single-path partition
// functions, tabulated in binary128 and redone in double-binary128 when the
// determinant cancels too deeply. m < r admits no disjoint tuple: -inf.
double logZ_sym(const SymWeightField& sym, int r, int m, int n);

// Sum over vertex-disjoint r-tuples, by enumeration (oracle for tiny sizes).
double logZ_sym_enumerate(const SymWeightField& sym, int r, int m, int n);

struct LineEnsemble {
  int N = 0;
  double centering = 0.0;                  // 2 N Psi(theta)
  std::vector<std::vector<double>> curves;  // curves[i-1][j-1] = L_i(j)
  double at(int i, int j) const { return curves[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]; }
  int depth() const { return static_cast<int>(curves.size()); }
};

// Curves 1..depth; jmax > 0 limits each curve to its first jmax points.
LineEnsemble build_line_ensemble(const SymWeightField& sym, int N, double theta, int depth, int jmax = 0);

struct OrderingReport {
  // families: L_i(2p+1) <= L_i(2p) + s, L_i(2p-1) <= L_i(2p) + s,
  //           L_{i+1}(2p) <= L_i(2p+1) + s, L_{i+1}(2p) <= L_i(2p-1) + s
  std::array<long, 4> violations{};
  std::array<long, 4> checked{};
  std::array<double, 4> worst_excess{};  // max of lhs - rhs (without slack)
  double slack = 0.0;
  long total_violations() const { return violations[0] + violations[1] + violations[2] + violations[3]; }
};

// slack = (log N)^exponent; p ranges over [1, N-K-2].
OrderingReport ordering_report(const LineEnsemble& ens, int K, double exponent);

}  // namespace hslg
