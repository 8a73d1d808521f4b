#pragma once

// Exact lattice coordinates. A state k * m * 2^{-scale} is stored as the
// integer pair (m, scale) next to its tagged unit k; arithmetic is exact and
// canonical (m odd, or m = 0 with scale = 0).

#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <string>

#include "symaudit/core.hpp"

namespace symaudit {

struct Dyadic {
  std::int64_t mantissa = 0;
  std::int32_t scale = 0;  // value = mantissa * 2^{-scale}; may be negative

  static Dyadic make(std::int64_t m, std::int32_t s) {
    Dyadic d{m, s};
    d.canonicalize();
    return d;
  }
  static Dyadic zero() { return {}; }
  /// 2^{-s}
  static Dyadic pow2(std::int32_t minus_exponent) { return {1, minus_exponent}; }
  /// Every finite double is dyadic; the conversion is exact.
  static Dyadic from_double(double x) {
    if (!std::isfinite(x)) throw DomainError("state must be finite");
    if (x == 0.0) return {};
    int e = 0;
    const double f = std::frexp(x, &e);  // x = f 2^e, 0.5 <= |f| < 1
    return make(static_cast<std::int64_t>(std::ldexp(f, 53)), 53 - e);
  }

  void canonicalize() {
    if (mantissa == 0) {
      scale = 0;
      return;
    }
    const int tz = std::countr_zero(static_cast<std::uint64_t>(mantissa));
    mantissa >>= tz;  // arithmetic shift keeps the sign; exact since low bits are zero
    scale -= tz;
  }

  bool is_zero() const { return mantissa == 0; }
  bool is_power_of_two_magnitude() const { return mantissa == 1 || mantissa == -1; }
  double to_double() const { return std::ldexp(static_cast<double>(mantissa), -scale); }

  friend bool operator==(const Dyadic&, const Dyadic&) = default;

  Dyadic operator-() const { return {-mantissa, scale}; }
};

namespace detail {

// floor(log2 |m|) for m != 0
inline int bit_width_minus_one(std::int64_t m) {
  const auto a = static_cast<std::uint64_t>(m < 0 ? -static_cast<__int128>(m) : m);
  return 63 - std::countl_zero(a);
}

}  // namespace detail

inline std::strong_ordering compare(const Dyadic& a, const Dyadic& b) {
  const int sa = (a.mantissa > 0) - (a.mantissa < 0);
  const int sb = (b.mantissa > 0) - (b.mantissa < 0);
  if (sa != sb) return sa <=> sb;
  if (sa == 0) return std::strong_ordering::equal;
  // same sign: compare magnitudes via binary exponents first
  const long ea = static_cast<long>(detail::bit_width_minus_one(a.mantissa)) - a.scale;
  const long eb = static_cast<long>(detail::bit_width_minus_one(b.mantissa)) - b.scale;
  std::strong_ordering mag = std::strong_ordering::equal;
  if (ea != eb) {
    mag = ea <=> eb;
  } else {
    // equal leading exponent: |scale difference| <= 62, alignment fits in 128 bits
    const int s = std::max(a.scale, b.scale);
    const __int128 ma = static_cast<__int128>(std::abs(a.mantissa)) << (s - a.scale);
    const __int128 mb = static_cast<__int128>(std::abs(b.mantissa)) << (s - b.scale);
    mag = ma <=> mb;
  }
  if (sa > 0) return mag;
  return 0 <=> mag;
}

inline bool operator<(const Dyadic& a, const Dyadic& b) { return compare(a, b) < 0; }
inline bool operator<=(const Dyadic& a, const Dyadic& b) { return compare(a, b) <= 0; }

inline Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const int s = std::max(a.scale, b.scale);
  const int shift_a = s - a.scale;
  const int shift_b = s - b.scale;
  auto widen = [](std::int64_t m, int shift) -> __int128 {
    if (shift > 62) throw RepresentationOverflow("dyadic addition exceeds 64-bit mantissa");
    return static_cast<__int128>(m) * (static_cast<__int128>(1) << shift);
  };
  __int128 m = widen(a.mantissa, shift_a) + widen(b.mantissa, shift_b);
  int scale = s;
  if (m == 0) return Dyadic::zero();
  while ((m & 1) == 0) {
    m /= 2;
    --scale;
  }
  if (m > INT64_MAX || m < -INT64_MAX) throw RepresentationOverflow("dyadic mantissa overflow");
  return {static_cast<std::int64_t>(m), static_cast<std::int32_t>(scale)};
}

inline Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

/// A state at an API boundary: the tagged unit plus the exact coordinate.
struct ExactState {
  LatticeUnit unit;
  Dyadic coord;

  double value() const { return unit.value * coord.to_double(); }
};

/// The lattice families that occur as reachable sets.
enum class LatticeKind {
  power_of_two,      // k {+-2^z : z in Z} u {0}
  dyadic_nonnegative,  // k m 2^{-n}, m in N
  ex32_reachable,    // {l k 2^n : l in N} u {k 2^z : z in Z} u {0}
};

struct Lattice {
  LatticeUnit unit;
  LatticeKind kind = LatticeKind::power_of_two;
  int n = 0;
};

/// Exact membership. Zero belongs to every lattice; a nonzero state on a
/// differently tagged unit never does.
inline bool on_lattice(const ExactState& s, const Lattice& lat) {
  if (s.coord.is_zero()) return true;
  if (s.unit.tag != lat.unit.tag) return false;
  const Dyadic& d = s.coord;
  switch (lat.kind) {
    case LatticeKind::power_of_two:
      return d.is_power_of_two_magnitude();
    case LatticeKind::dyadic_nonnegative:
      return d.mantissa > 0 && d.scale <= lat.n;
    case LatticeKind::ex32_reachable:
      return d.mantissa > 0 && (d.mantissa == 1 || d.scale <= -lat.n);
  }
  return false;
}

}  // namespace symaudit
