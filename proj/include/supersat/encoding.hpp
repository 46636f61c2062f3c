#pragma once

#include <optional>
#include <vector>

#include "supersat/common.hpp"
#include "supersat/equation.hpp"

namespace supersat {

using LatticePoint = std::vector<i64>;

// Positional value of a point of [t]^d in base a_sum*t. Digits sit in [1,t],
// so for any invariant equation with coefficient mass a_sum the linear form
// evaluated on encoded values never carries between positions.
struct EncodedPoint {
  i64 value = 0;
  i64 base = 0;
  LatticePoint digits;
};

namespace detail {

inline i64 encode_base(i64 base_mult, i64 t, i64 d) {
  const i64 base = checked_mul(base_mult, t);
  if (base < 2) throw config_error("encoding base must be at least 2");
  // reject parameters whose value range would overflow i64
  i64 power = 1;
  for (i64 i = 0; i < d; ++i) power = checked_mul(power, base);
  return base;
}

inline i64 encode_value(const LatticePoint& x, i64 base, i64 t) {
  i128 value = 0;
  i128 weight = 1;
  for (const i64 digit : x) {
    if (digit < 1 || digit > t) throw config_error("encode: coordinate outside [1,t]");
    value += weight * digit;
    weight *= base;
  }
  return narrow_i64(value, "encoded point value");
}

}  // namespace detail

inline EncodedPoint encode_point(const LatticePoint& x, i64 a_sum, i64 t) {
  if (x.empty()) throw config_error("encode: empty point");
  const i64 base = detail::encode_base(a_sum, t, static_cast<i64>(x.size()));
  return EncodedPoint{detail::encode_value(x, base, t), base, x};
}

// Inverse of encode_point. Returns nullopt when the value is not a valid
// d-digit encoding with every digit in [1,t_max] -- the caller-skips signal.
inline std::optional<LatticePoint> decode_point(i64 value, i64 base, i64 d,
                                                i64 t_max) {
  if (value <= 0 || base < 2 || d < 1 || t_max < 1 || t_max >= base) return std::nullopt;
  LatticePoint digits;
  digits.reserve(static_cast<std::size_t>(d));
  for (i64 i = 0; i < d; ++i) {
    const i64 digit = value % base;
    if (digit < 1 || digit > t_max) return std::nullopt;
    digits.push_back(digit);
    value /= base;
  }
  if (value != 0) return std::nullopt;
  return digits;
}

// The no-carry lemma, checked from both ends: sum_j a_j * p(x^j) over the
// integers vanishes iff sum_j a_j * x^j_i vanishes in every coordinate. Both
// sides are computed independently; disagreement would be a bug.
inline bool check_no_carry(const InvariantEquation& eq,
                           const std::vector<LatticePoint>& points, i64 t) {
  if (static_cast<int>(points.size()) != eq.k())
    throw config_error("check_no_carry: need one point per variable");
  const i64 d = static_cast<i64>(points.front().size());
  for (const auto& pt : points)
    if (static_cast<i64>(pt.size()) != d)
      throw config_error("check_no_carry: dimension mismatch");

  bool coord_zero = true;
  for (i64 i = 0; i < d; ++i) {
    i128 c = 0;
    for (int j = 0; j < eq.k(); ++j) {
      const i64 digit = points[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      if (digit < 1 || digit > t) throw config_error("check_no_carry: coordinate outside [1,t]");
      c += i128{eq.coeffs()[static_cast<std::size_t>(j)]} * digit;
    }
    if (c != 0) {
      coord_zero = false;
      break;
    }
  }

  const i64 base = detail::encode_base(eq.a_sum(), t, d);
  i128 encoded_sum = 0;
  for (int j = 0; j < eq.k(); ++j)
    encoded_sum += i128{eq.coeffs()[static_cast<std::size_t>(j)]} *
                   detail::encode_value(points[static_cast<std::size_t>(j)], base, t);

  require((encoded_sum == 0) == coord_zero, "no-carry lemma violated");
  return encoded_sum == 0;
}

}  // namespace supersat
