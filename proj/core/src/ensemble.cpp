#include "hslg/ensemble.hpp"

#include <quadmath.h>

#include <cstdio>
#include <optional>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "hslg/specfun.hpp"
#include "dquad.hpp"

namespace hslg {
namespace {

using detail::DQuad;
using detail::quad;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_quad(quad x) {
  int e = 0;
  const quad m = frexpq(x, &e);
  return std::log(static_cast<double>(m)) + e * std::numbers::ln2;
}

quad exp_quad(double lw) {
  if (std::abs(lw) < 700.0) return static_cast<quad>(std::exp(lw));
  return expq(static_cast<quad>(lw));
}

// Z((1,s) -> (i,j)) for i <= imax, s <= j <= jmax, i + j <= cap.
template <class T>
class PathTable {
 public:
  PathTable(const std::vector<T>& w, int imax, int jmax, int cap, int s)
      : imax_(imax), jmax_(jmax), s_(s), width_(jmax - s + 1) {
    data_.assign(static_cast<std::size_t>(imax) * std::max(width_, 0), T(0));
    for (int i = 1; i <= imax; ++i) {
      for (int j = s; j <= jmax && i + j <= cap; ++j) {
        const T wij = w[static_cast<std::size_t>(i - 1) * jmax + (j - 1)];
        T acc = (i == 1 && j == s) ? T(1) : T(0);
        if (i > 1) acc += at(i - 1, j);
        if (j > s) acc += at(i, j - 1);
        data_[idx(i, j)] = wij * acc;
      }
    }
  }
  T value(int i, int j) const {
    if (i < 1 || i > imax_ || j < s_ || j > jmax_) return T(0);
    return at(i, j);
  }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i - 1) * width_ + (j - s_); }
  T at(int i, int j) const { return data_[idx(i, j)]; }
  int imax_, jmax_, s_, width_;
  std::vector<T> data_;
};

template <class T>
std::vector<T> weight_grid(const SymWeightField& sym, int imax, int jmax, int cap) {
  std::vector<T> w(static_cast<std::size_t>(imax) * jmax, T(0));
  for (int i = 1; i <= imax; ++i)
    for (int j = 1; j <= jmax && i + j <= cap; ++j)
      w[static_cast<std::size_t>(i - 1) * jmax + (j - 1)] = T(exp_quad(sym.log_weight(i, j)));
  return w;
}

template <class T>
T lu_det(std::vector<T> a, int r) {
  T det = 1;
  for (int c = 0; c < r; ++c) {
    int piv = c;
    T best = a[c * r + c] < 0 ? -a[c * r + c] : a[c * r + c];
    for (int k = c + 1; k < r; ++k) {
      const T v = a[k * r + c] < 0 ? -a[k * r + c] : a[k * r + c];
      if (v > best) {
        best = v;
        piv = k;
      }
    }
    if (best == 0) return 0;
    if (piv != c) {
      for (int k = 0; k < r; ++k) std::swap(a[c * r + k], a[piv * r + k]);
      det = -det;
    }
    det *= a[c * r + c];
    for (int k = c + 1; k < r; ++k) {
      const T f = a[k * r + c] / a[c * r + c];
      for (int l = c; l < r; ++l) a[k * r + l] -= f * a[c * r + l];
    }
  }
  return det;
}

double log_abs(quad x) { return log_quad(x); }
double log_abs(const DQuad& x) { return log_quad(x.hi) + std::log1p(static_cast<double>(x.lo / x.hi)); }
double to_double(quad x) { return static_cast<double>(x); }
double to_double(const DQuad& x) { return static_cast<double>(x); }

// log det of a nonnegative LGV matrix, or nothing when the determinant has
// cancelled beyond what precision T can resolve. Rows are scaled by their
// maxima; the residual determinant is taken in double unless it has cancelled
// by more than four digits relative to the Hadamard bound.
template <class T>
std::optional<double> lgv_log_det(const std::vector<T>& m, int r, double min_ratio, double* ratio_out = nullptr) {
  if (r == 1) {
    if (!(m[0] > T(0))) throw NumericalError("LGV: empty path set");
    return log_abs(m[0]);
  }
  std::vector<T> scaled(m);
  double log_scale = 0.0;
  double hadamard = 1.0;
  for (int i = 0; i < r; ++i) {
    T mx = 0;
    for (int j = 0; j < r; ++j)
      if (scaled[i * r + j] > mx) mx = scaled[i * r + j];
    if (!(mx > T(0))) throw NumericalError("LGV: zero row (no admissible path)");
    log_scale += log_abs(mx);
    double norm2 = 0.0;
    for (int j = 0; j < r; ++j) {
      scaled[i * r + j] /= mx;
      const double v = to_double(scaled[i * r + j]);
      norm2 += v * v;
    }
    hadamard *= std::sqrt(norm2);
  }
  std::vector<double> dbl;
  for (const T& x : scaled) dbl.push_back(to_double(x));
  const double dd = lu_det(dbl, r);
  if (dd > 0.0 && dd / hadamard >= 1e-4) return log_scale + std::log(dd);
  const T dq = lu_det(scaled, r);
  const double ratio = to_double(dq) / hadamard;
  if (ratio_out) *ratio_out = ratio;
  if (!(dq > T(0)) || !(ratio > min_ratio)) return std::nullopt;
  return log_scale + log_abs(dq);
}

constexpr double kQuadMinRatio = 1e-28;   // binary128 entries carry ~1e-34 relative error
constexpr double kDQuadMinRatio = 1e-55;  // double-binary128, ~1e-66

// LGV matrix [Z((1, r+1-a) -> (m, n-b+1))]_{a,b}.
template <class T>
std::vector<T> lgv_matrix(const std::vector<PathTable<T>>& tabs, int r, int m, int n) {
  std::vector<T> mat(static_cast<std::size_t>(r) * r);
  for (int a = 1; a <= r; ++a)
    for (int b = 1; b <= r; ++b) mat[(a - 1) * r + (b - 1)] = tabs[r - a].value(m, n - b + 1);
  return mat;
}

[[noreturn]] void lgv_failure(int r, int m, int n, double ratio) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", ratio);
  throw NumericalError("LGV: determinant cancelled beyond double-binary128 precision (r = " + std::to_string(r) +
                       ", endpoint (" + std::to_string(m) + "," + std::to_string(n) + "), det/Hadamard = " + buf + ")");
}

}  // namespace

SymWeightField::SymWeightField(int N, std::vector<double> lower) : N_(N), lower_(std::move(lower)) {
  if (N < 1) throw DomainError("SymWeightField: N must be positive");
}

SymWeightField symmetrize(const LogWeightField& field) {
  const int N = field.N();
  const int cap = 2 * N + 1;
  if (field.imax() < 2 * N) throw DomainError("symmetrize: field does not cover i + j <= 2N + 1");
  const int imax = 2 * N;
  std::vector<double> lower(static_cast<std::size_t>(imax) * (imax + 1) / 2, kNegInf);
  for (int i = 1; i <= imax; ++i)
    for (int j = 1; j <= i && i + j <= cap; ++j)
      lower[static_cast<std::size_t>(i) * (i - 1) / 2 + (j - 1)] =
          field.log_weight(i, j) - (i == j ? std::numbers::ln2 : 0.0);
  return SymWeightField(N, std::move(lower));
}

double logZ_sym(const SymWeightField& sym, int r, int m, int n) {
  if (r < 0 || n < r) throw DomainError("logZ_sym: need n >= r >= 0");
  if (r == 0) return 0.0;
  if (!sym.contains(m, n)) throw DomainError("logZ_sym: endpoint outside the symmetrized domain");
  // r disjoint paths leaving row 1 from columns 1..r need r rows; otherwise Z = 0 exactly
  if (m < r) return kNegInf;
  if (r == 1) {
    std::vector<double> row(static_cast<std::size_t>(n) + 1, kNegInf);
    for (int i = 1; i <= m; ++i) {
      for (int j = 1; j <= n; ++j) {
        const double acc = (i == 1 && j == 1) ? 0.0 : logsumexp(row[j], row[j - 1]);
        row[j] = sym.log_weight(i, j) + acc;
      }
      row[0] = kNegInf;
    }
    return row[n];
  }
  const int cap = 2 * sym.N() + 1;
  {
    const auto w = weight_grid<quad>(sym, m, n, cap);
    std::vector<PathTable<quad>> tabs;
    for (int s = 1; s <= r; ++s) tabs.emplace_back(w, m, n, cap, s);
    if (auto v = lgv_log_det(lgv_matrix(tabs, r, m, n), r, kQuadMinRatio)) return *v;
  }
  const auto w = weight_grid<DQuad>(sym, m, n, cap);
  std::vector<PathTable<DQuad>> tabs;
  for (int s = 1; s <= r; ++s) tabs.emplace_back(w, m, n, cap, s);
  double ratio = 0.0;
  if (auto v = lgv_log_det(lgv_matrix(tabs, r, m, n), r, kDQuadMinRatio, &ratio)) return *v;
  lgv_failure(r, m, n, ratio);
}

namespace {

using Path = std::vector<std::pair<int, int>>;

void paths_between(const SymWeightField& sym, int i, int j, int m, int n, Path& cur, std::vector<Path>& out) {
  cur.push_back({i, j});
  if (i == m && j == n) {
    out.push_back(cur);
  } else {
    if (i < m && sym.contains(i + 1, j)) paths_between(sym, i + 1, j, m, n, cur, out);
    if (j < n && sym.contains(i, j + 1)) paths_between(sym, i, j + 1, m, n, cur, out);
  }
  cur.pop_back();
}

}  // namespace

double logZ_sym_enumerate(const SymWeightField& sym, int r, int m, int n) {
  if (r < 0 || n < r) throw DomainError("logZ_sym_enumerate: need n >= r >= 0");
  if (r == 0) return 0.0;
  if (m + n > 16 || r > 4) throw RefusalError("logZ_sym_enumerate: budget is m + n <= 16, r <= 4");
  std::vector<std::vector<Path>> sets(static_cast<std::size_t>(r));
  std::vector<std::vector<double>> lw(static_cast<std::size_t>(r));
  for (int a = 1; a <= r; ++a) {
    Path cur;
    paths_between(sym, 1, r + 1 - a, m, n - a + 1, cur, sets[a - 1]);
    for (const auto& p : sets[a - 1]) {
      double s = 0.0;
      for (auto [i, j] : p) s += sym.log_weight(i, j);
      lw[a - 1].push_back(s);
    }
  }
  double acc = kNegInf;
  std::vector<std::vector<char>> used(static_cast<std::size_t>(m) + 1, std::vector<char>(static_cast<std::size_t>(n) + 1, 0));
  auto rec = [&](auto&& self, int a, double w) -> void {
    if (a == r) {
      acc = logsumexp(acc, w);
      return;
    }
    for (std::size_t k = 0; k < sets[a].size(); ++k) {
      const Path& p = sets[a][k];
      bool ok = true;
      for (auto [i, j] : p)
        if (used[i][j]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      for (auto [i, j] : p) used[i][j] = 1;
      self(self, a + 1, w + lw[a][k]);
      for (auto [i, j] : p) used[i][j] = 0;
    }
  };
  rec(rec, 0, 0.0);
  return acc;
}

LineEnsemble build_line_ensemble(const SymWeightField& sym, int N, double theta, int depth, int jmax) {
  if (N != sym.N()) throw DomainError("build_line_ensemble: N mismatch");
  if (depth < 1 || depth > N) throw DomainError("build_line_ensemble: need 1 <= depth <= N");
  LineEnsemble ens;
  ens.N = N;
  ens.centering = 2.0 * N * digamma(theta);
  const int cap = 2 * N + 1;
  int jtop = 2 * N;
  if (jmax > 0) jtop = std::min(jtop, jmax);
  const int imax = N + jtop / 2;
  const int jcols = N;
  const auto w = weight_grid<quad>(sym, imax, jcols, cap);
  std::vector<PathTable<quad>> tabs;
  for (int s = 1; s <= depth; ++s) tabs.emplace_back(w, imax, jcols, cap, s);
  std::vector<PathTable<DQuad>> wide;  // built on the first determinant binary128 cannot resolve

  std::map<std::pair<int, int>, std::vector<double>> cache;  // (p,q) -> log Z^{(r)}, r = 0..depth
  auto logz = [&](int p, int q, int r) -> double {
    auto& v = cache[{p, q}];
    if (v.empty()) v.assign(static_cast<std::size_t>(depth) + 1, std::numeric_limits<double>::quiet_NaN());
    double& slot = v[static_cast<std::size_t>(r)];
    if (std::isnan(slot)) {
      if (r == 0) {
        slot = 0.0;
      } else {
        if (auto v = lgv_log_det(lgv_matrix(tabs, r, p, q), r, kQuadMinRatio)) {
          slot = *v;
        } else {
          if (wide.empty()) {
            const auto wd = weight_grid<DQuad>(sym, imax, jcols, cap);
            for (int s = 1; s <= depth; ++s) wide.emplace_back(wd, imax, jcols, cap, s);
          }
          double ratio = 0.0;
          auto v2 = lgv_log_det(lgv_matrix(wide, r, p, q), r, kDQuadMinRatio, &ratio);
          if (!v2) lgv_failure(r, p, q, ratio);
          slot = *v2;
        }
      }
    }
    return slot;
  };

  ens.curves.resize(static_cast<std::size_t>(depth));
  for (int i = 1; i <= depth; ++i) {
    const int len = std::min(2 * N - 2 * i + 2, jtop);
    auto& c = ens.curves[static_cast<std::size_t>(i - 1)];
    c.resize(static_cast<std::size_t>(len));
    for (int j = 1; j <= len; ++j) {
      const int p = N + j / 2;
      const int q = N - (j + 1) / 2 + 1;
      c[static_cast<std::size_t>(j - 1)] = std::numbers::ln2 + logz(p, q, i) - logz(p, q, i - 1) + ens.centering;
    }
  }
  return ens;
}

OrderingReport ordering_report(const LineEnsemble& ens, int K, double exponent) {
  if (K < 1 || K > ens.depth()) throw DomainError("ordering_report: depth K not available");
  const int N = ens.N;
  OrderingReport rep;
  rep.slack = std::pow(std::log(static_cast<double>(N)), exponent);
  rep.worst_excess.fill(-std::numeric_limits<double>::infinity());
  auto check = [&](int fam, double lhs, double rhs) {
    ++rep.checked[fam];
    rep.worst_excess[fam] = std::max(rep.worst_excess[fam], lhs - rhs);
    if (lhs > rhs + rep.slack) ++rep.violations[fam];
  };
  for (int p = 1; p <= N - K - 2; ++p) {
    for (int i = 1; i <= K; ++i) {
      check(0, ens.at(i, 2 * p + 1), ens.at(i, 2 * p));
      check(1, ens.at(i, 2 * p - 1), ens.at(i, 2 * p));
      if (i + 1 <= K) {
        check(2, ens.at(i + 1, 2 * p), ens.at(i, 2 * p + 1));
        check(3, ens.at(i + 1, 2 * p), ens.at(i, 2 * p - 1));
      }
    }
  }
  return rep;
}

}  // namespace hslg
