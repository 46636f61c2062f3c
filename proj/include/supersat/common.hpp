#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace supersat {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

// Raised for invalid user-supplied configuration (CLI exit code 2).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a request exceeds an enumeration/exhaustion budget (exit code 3).
struct budget_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an internal invariant that should be unconditionally true fails
// (exit code 4). Seeing one of these is a bug, not a usage problem.
struct invariant_error : std::logic_error {
  using std::logic_error::logic_error;
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw invariant_error(msg);
}

inline i64 checked_mul(i64 a, i64 b) {
  i64 out = 0;
  if (__builtin_mul_overflow(a, b, &out))
    throw budget_error("64-bit multiplication overflow");
  return out;
}

inline i64 checked_add(i64 a, i64 b) {
  i64 out = 0;
  if (__builtin_add_overflow(a, b, &out))
    throw budget_error("64-bit addition overflow");
  return out;
}

inline i64 narrow_i64(i128 v, const char* what) {
  if (v > i128{std::numeric_limits<i64>::max()} ||
      v < i128{std::numeric_limits<i64>::min()})
    throw budget_error(std::string("count exceeds 64-bit range: ") + what);
  return static_cast<i64>(v);
}

// Exact nonnegative rational, used for densities and thresholds so that
// comparisons like |fiber| >= eps*|X|/2 never touch floating point.
struct Ratio {
  i64 num = 0;
  i64 den = 1;

  Ratio() = default;
  Ratio(i64 n, i64 d) : num(n), den(d) {
    if (den <= 0) throw config_error("ratio denominator must be positive");
    if (num < 0) throw config_error("ratio must be nonnegative");
    const i64 g = std::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  // ceil(*this * n)
  i64 ceil_mul(i64 n) const {
    const i128 t = i128{num} * n;
    return narrow_i64((t + den - 1) / den, "ceil_mul");
  }
};

inline bool operator==(const Ratio& a, const Ratio& b) {
  return a.num == b.num && a.den == b.den;
}
inline bool operator<(const Ratio& a, const Ratio& b) {
  return i128{a.num} * b.den < i128{b.num} * a.den;
}
inline bool operator<=(const Ratio& a, const Ratio& b) {
  return i128{a.num} * b.den <= i128{b.num} * a.den;
}

// Parses "0.9", ".5", "9/10" or "1" into an exact rational.
inline Ratio parse_ratio(const std::string& text) {
  if (text.empty()) throw config_error("empty ratio");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const i64 n = std::stoll(text.substr(0, slash));
    const i64 d = std::stoll(text.substr(slash + 1));
    return Ratio(n, d);
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Ratio(std::stoll(text), 1);
  const std::string whole = text.substr(0, dot);
  const std::string frac = text.substr(dot + 1);
  if (frac.size() > 18) throw config_error("ratio has too many decimal digits");
  i64 den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den = checked_mul(den, 10);
  const i64 w = whole.empty() ? 0 : std::stoll(whole);
  const i64 f = frac.empty() ? 0 : std::stoll(frac);
  return Ratio(checked_add(checked_mul(w, den), f), den);
}

inline u64 splitmix64(u64 x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream seed for trial `index` of run `seed`; used so that parallel workers
// draw identical randomness regardless of how trials are partitioned.
inline u64 stream_seed(u64 seed, u64 index) {
  return splitmix64(seed ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

// mt19937_64 has a standard-specified output sequence, but the standard
// library distributions do not; this wrapper adds portable draws.
class Rng {
 public:
  explicit Rng(u64 seed) : gen_(seed) {}

  u64 next() { return gen_(); }

  // Uniform value in [0, bound) via masked rejection.
  u64 below(u64 bound) {
    require(bound > 0, "Rng::below on empty range");
    u64 mask = bound - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    u64 r;
    do {
      r = gen_() & mask;
    } while (r >= bound);
    return r;
  }

  double unit() {  // [0,1) with 53 random bits
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace supersat
