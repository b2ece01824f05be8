#pragma once
// Double-binary128 ("double-quad") arithmetic, about 226 significant bits,
// built from error-free transformations on __float128. Used only as the
// fallback for LGV determinants that cancel beyond binary128.

#include <quadmath.h>

namespace hslg::detail {

using quad = __float128;

struct DQuad {
  quad hi = 0, lo = 0;
  DQuad() = default;
  DQuad(quad h) : hi(h) {}  // NOLINT: implicit on purpose, mirrors a numeric type
  DQuad(int h) : hi(h) {}
  DQuad(quad h, quad l) : hi(h), lo(l) {}
  explicit operator double() const { return static_cast<double>(hi) + static_cast<double>(lo); }
};

inline DQuad quick_two_sum(quad a, quad b) {
  const quad s = a + b;
  return {s, b - (s - a)};
}

inline DQuad two_sum(quad a, quad b) {
  const quad s = a + b;
  const quad bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DQuad operator+(const DQuad& a, const DQuad& b) {
  DQuad s = two_sum(a.hi, b.hi);
  const DQuad t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}
inline DQuad operator-(const DQuad& a) { return {-a.hi, -a.lo}; }
inline DQuad operator-(const DQuad& a, const DQuad& b) { return a + (-b); }

inline DQuad operator*(const DQuad& a, const DQuad& b) {
  const quad p = a.hi * b.hi;
  quad e = fmaq(a.hi, b.hi, -p);
  e += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p, e);
}

inline DQuad operator/(const DQuad& a, const DQuad& b) {
  const quad q1 = a.hi / b.hi;
  DQuad r = a - b * DQuad(q1);
  const quad q2 = r.hi / b.hi;
  r = r - b * DQuad(q2);
  const quad q3 = r.hi / b.hi;
  return quick_two_sum(q1, q2) + DQuad(q3);
}

inline DQuad& operator+=(DQuad& a, const DQuad& b) { return a = a + b; }
inline DQuad& operator-=(DQuad& a, const DQuad& b) { return a = a - b; }
inline DQuad& operator*=(DQuad& a, const DQuad& b) { return a = a * b; }
inline DQuad& operator/=(DQuad& a, const DQuad& b) { return a = a / b; }

inline bool operator<(const DQuad& a, const DQuad& b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(const DQuad& a, const DQuad& b) { return b < a; }
inline bool operator==(const DQuad& a, const DQuad& b) { return a.hi == b.hi && a.lo == b.lo; }

}  // namespace hslg::detail
