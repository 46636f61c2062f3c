#pragma once

#include <algorithm>
#include <vector>

#include "supersat/common.hpp"
#include "supersat/equation.hpp"
#include "supersat/modular.hpp"
#include "supersat/ntt.hpp"

namespace supersat {

// A subset of either the interval {1,...,n} or the field F_p (residues
// 0..p-1), held as an indicator vector.
class GroundSet {
 public:
  enum class Universe { kInterval, kPrimeField };

  static constexpr i64 kMaxUniverseSize = i64{1} << 26;

  static GroundSet interval(i64 n, const std::vector<i64>& members) {
    GroundSet s(Universe::kInterval, n);
    for (const i64 v : members) s.insert(v);
    return s;
  }

  static GroundSet full_interval(i64 n) {
    GroundSet s(Universe::kInterval, n);
    for (i64 v = 1; v <= n; ++v) s.insert(v);
    return s;
  }

  static GroundSet prime_field(i64 p, const std::vector<i64>& members) {
    if (!is_prime(p)) throw config_error("prime_field modulus is not prime");
    GroundSet s(Universe::kPrimeField, p);
    for (const i64 v : members) s.insert(v);
    return s;
  }

  static GroundSet full_field(i64 p) {
    if (!is_prime(p)) throw config_error("prime_field modulus is not prime");
    GroundSet s(Universe::kPrimeField, p);
    for (i64 v = 0; v < p; ++v) s.insert(v);
    return s;
  }

  static GroundSet empty(Universe u, i64 size) { return GroundSet(u, size); }

  // Uniform random subset of the given cardinality (partial Fisher-Yates,
  // portable draws; fully determined by the seed).
  static GroundSet random_subset(Universe u, i64 size, i64 cardinality, u64 seed) {
    GroundSet s(u, size);
    if (cardinality < 0 || cardinality > size)
      throw config_error("random_subset cardinality out of range");
    std::vector<i64> pool(size);
    const i64 lo = (u == Universe::kInterval) ? 1 : 0;
    for (i64 i = 0; i < size; ++i) pool[i] = lo + i;
    Rng rng(splitmix64(seed));
    for (i64 i = 0; i < cardinality; ++i) {
      const i64 j = i + static_cast<i64>(rng.below(static_cast<u64>(size - i)));
      std::swap(pool[i], pool[j]);
      s.insert(pool[i]);
    }
    return s;
  }

  Universe universe() const { return universe_; }
  i64 universe_size() const { return size_; }
  i64 count() const { return count_; }
  Ratio density() const { return Ratio(count_, size_); }

  bool contains(i64 v) const {
    if (v < lo_ || v > hi_) return false;
    return ind_[static_cast<std::size_t>(v - lo_)] != 0;
  }

  void insert(i64 v) {
    if (v < lo_ || v > hi_) throw config_error("element outside universe");
    auto& cell = ind_[static_cast<std::size_t>(v - lo_)];
    if (!cell) {
      cell = 1;
      ++count_;
    }
  }

  void erase(i64 v) {
    if (v < lo_ || v > hi_) return;
    auto& cell = ind_[static_cast<std::size_t>(v - lo_)];
    if (cell) {
      cell = 0;
      --count_;
    }
  }

  std::vector<i64> elements() const {
    std::vector<i64> out;
    out.reserve(static_cast<std::size_t>(count_));
    for (i64 v = lo_; v <= hi_; ++v)
      if (ind_[static_cast<std::size_t>(v - lo_)]) out.push_back(v);
    return out;
  }

  bool subset_of(const GroundSet& other) const {
    if (universe_ != other.universe_ || size_ != other.size_) return false;
    for (i64 v = lo_; v <= hi_; ++v)
      if (contains(v) && !other.contains(v)) return false;
    return true;
  }

  // x -> lambda*x + mu over F_p (field sets only); counts are invariant
  // under this map for invariant homogeneous equations.
  GroundSet map_affine(i64 lambda, i64 mu) const {
    if (universe_ != Universe::kPrimeField)
      throw config_error("map_affine requires a field set");
    if (mod_norm(lambda, size_) == 0) throw config_error("map_affine: lambda must be nonzero");
    GroundSet out(universe_, size_);
    for (const i64 v : elements())
      out.insert(mod_norm(i128{lambda} * v + mu, size_));
    return out;
  }

 private:
  GroundSet(Universe u, i64 size) : universe_(u), size_(size) {
    if (size < 1) throw config_error("universe must be nonempty");
    if (size > kMaxUniverseSize) throw budget_error("universe too large");
    lo_ = (u == Universe::kInterval) ? 1 : 0;
    hi_ = (u == Universe::kInterval) ? size : size - 1;
    ind_.assign(static_cast<std::size_t>(size), 0);
  }

  Universe universe_;
  i64 size_;
  i64 lo_ = 0;
  i64 hi_ = 0;
  i64 count_ = 0;
  std::vector<std::uint8_t> ind_;
};

enum class CountEngine { kAuto, kNaive, kConvolution };

namespace detail {

// Indicator of the dilated set c*S, as (vector, offset): value v has index
// v - offset. Over F_p the "offset" is 0 and indices are residues.
struct DilatedIndicator {
  std::vector<u64> vec;
  i64 offset = 0;
};

inline DilatedIndicator dilate(i64 c, const GroundSet& s) {
  DilatedIndicator out;
  if (s.universe() == GroundSet::Universe::kPrimeField) {
    const i64 p = s.universe_size();
    out.vec.assign(static_cast<std::size_t>(p), 0);
    const i64 cm = mod_norm(c, p);
    for (const i64 v : s.elements()) out.vec[static_cast<std::size_t>(mod_mul(cm, v, p))] = 1;
    return out;
  }
  const i64 n = s.universe_size();
  const i64 lo = std::min(c, checked_mul(c, n));
  const i64 hi = std::max(c, checked_mul(c, n));
  if (hi - lo + 1 > GroundSet::kMaxUniverseSize)
    throw budget_error("dilated support too large for convolution");
  out.offset = lo;
  out.vec.assign(static_cast<std::size_t>(hi - lo + 1), 0);
  for (const i64 v : s.elements())
    out.vec[static_cast<std::size_t>(c * v - lo)] = 1;
  return out;
}

inline std::vector<u64> fold_cyclic(const std::vector<u64>& linear, i64 p) {
  std::vector<u64> out(static_cast<std::size_t>(p), 0);
  for (std::size_t i = 0; i < linear.size(); ++i)
    out[i % static_cast<std::size_t>(p)] += linear[i];
  return out;
}

// Solutions over the remaining nonzero-coefficient variables, one value per
// variable, repeats allowed. m = coeffs.size() in {0..4}.
inline i64 count_all_nonzero(const std::vector<i64>& coeffs, const GroundSet& s,
                             CountEngine engine) {
  const bool field = s.universe() == GroundSet::Universe::kPrimeField;
  const i64 p = s.universe_size();
  const std::size_t m = coeffs.size();
  if (m == 0) return 1;

  const auto elems = s.elements();
  if (elems.empty()) return 0;

  auto solve_last = [&](i128 partial, i64 c_last) -> i64 {
    // x with c_last*x = -partial; returns the count (0 or 1) of members.
    if (field) {
      const i64 target = mod_norm(-partial, p);
      const i64 x = mod_mul(target, mod_inv(c_last, p), p);
      return s.contains(x) ? 1 : 0;
    }
    const i128 v = -partial;
    if (v % c_last != 0) return 0;
    const i128 x = v / c_last;
    if (x < 1 || x > s.universe_size()) return 0;
    return s.contains(static_cast<i64>(x)) ? 1 : 0;
  };

  if (m == 1) return solve_last(0, coeffs[0]);
  if (m == 2) {
    i64 cnt = 0;
    for (const i64 x : elems) cnt += solve_last(i128{coeffs[0]} * x, coeffs[1]);
    return cnt;
  }

  const bool naive =
      engine == CountEngine::kNaive ||
      (engine == CountEngine::kAuto &&
       (m == 3 ? i128{elems.size()} * elems.size() <= (i128{1} << 22)
               : i128{elems.size()} * elems.size() * elems.size() <= (i128{1} << 22)));

  if (naive) {
    i64 cnt = 0;
    if (m == 3) {
      for (const i64 x : elems)
        for (const i64 y : elems)
          cnt += solve_last(i128{coeffs[0]} * x + i128{coeffs[1]} * y, coeffs[2]);
    } else {
      for (const i64 x : elems)
        for (const i64 y : elems) {
          const i128 part = i128{coeffs[0]} * x + i128{coeffs[1]} * y;
          for (const i64 z : elems)
            cnt += solve_last(part + i128{coeffs[2]} * z, coeffs[3]);
        }
    }
    return cnt;
  }

  // Convolution route: pair the variables two by two and read one exact dot
  // product. Indicators are 0/1, so every convolution coefficient is at most
  // |S| -- the bound handed to the exact convolution kernel.
  const u64 coeff_bound = static_cast<u64>(s.count());
  const auto f0 = dilate(coeffs[0], s);
  const auto f1 = dilate(coeffs[1], s);
  auto g = exact_convolution(f0.vec, f1.vec, coeff_bound);
  const i64 off_g = f0.offset + f1.offset;

  u128 total = 0;
  if (field) {
    g = fold_cyclic(g, p);
    if (m == 3) {
      const auto f2 = dilate(coeffs[2], s);
      for (i64 r = 0; r < p; ++r)
        total += u128{g[static_cast<std::size_t>(r)]} *
                 f2.vec[static_cast<std::size_t>((p - r) % p)];
    } else {
      const auto f2 = dilate(coeffs[2], s);
      const auto f3 = dilate(coeffs[3], s);
      auto h = fold_cyclic(exact_convolution(f2.vec, f3.vec, coeff_bound), p);
      for (i64 r = 0; r < p; ++r)
        total += u128{g[static_cast<std::size_t>(r)]} *
                 h[static_cast<std::size_t>((p - r) % p)];
    }
  } else {
    const auto dot_at = [&](const std::vector<u64>& h, i64 off_h) {
      u128 acc = 0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (g[j] == 0) continue;
        const i64 want = -(off_g + static_cast<i64>(j)) - off_h;
        if (want < 0 || want >= static_cast<i64>(h.size())) continue;
        acc += u128{g[j]} * h[static_cast<std::size_t>(want)];
      }
      return acc;
    };
    if (m == 3) {
      const auto f2 = dilate(coeffs[2], s);
      total = dot_at(f2.vec, f2.offset);
    } else {
      const auto f2 = dilate(coeffs[2], s);
      const auto f3 = dilate(coeffs[3], s);
      const auto h = exact_convolution(f2.vec, f3.vec, coeff_bound);
      total = dot_at(h, f2.offset + f3.offset);
    }
  }
  return narrow_i64(static_cast<i128>(total), "convolution count");
}

// Zero-coefficient variables are free and contribute a factor |S| each.
inline i64 count_all_pattern(const std::vector<i64>& coeffs, const GroundSet& s,
                             CountEngine engine) {
  std::vector<i64> nz;
  int zeros = 0;
  for (const i64 c : coeffs) {
    if (c == 0)
      ++zeros;
    else
      nz.push_back(c);
  }
  if (nz.size() > 4) throw config_error("counting supports at most 4 active variables");
  i128 total = count_all_nonzero(nz, s, engine);
  for (int i = 0; i < zeros; ++i) total *= s.count();
  return narrow_i64(total, "pattern count");
}

inline void check_arity(const InvariantEquation& eq) {
  if (eq.k() != 3 && eq.k() != 4)
    throw config_error("counting supports k in {3,4} only");
}

}  // namespace detail

// Ordered k-tuples from S (repeats allowed) with sum a_i x_i = 0 in the
// ambient structure. Reference oracle: plain nested loops.
inline i64 count_all_naive(const InvariantEquation& eq, const GroundSet& s) {
  detail::check_arity(eq);
  return detail::count_all_pattern(eq.coeffs(), s, CountEngine::kNaive);
}

// Same count through indicator convolutions; exact integer arithmetic
// throughout, equals count_all_naive by construction.
inline i64 count_all_convolution(const InvariantEquation& eq, const GroundSet& s) {
  detail::check_arity(eq);
  return detail::count_all_pattern(eq.coeffs(), s, CountEngine::kConvolution);
}

inline i64 count_all(const InvariantEquation& eq, const GroundSet& s,
                     CountEngine engine = CountEngine::kAuto) {
  detail::check_arity(eq);
  return detail::count_all_pattern(eq.coeffs(), s, engine);
}

// Ordered k-tuples with pairwise distinct entries, by Moebius inversion over
// the partition lattice: mu(0,pi) = prod_B (-1)^(|B|-1) (|B|-1)!, and each
// partition contributes the all-tuples count of its block-reduced equation.
inline i64 count_distinct(const InvariantEquation& eq, const GroundSet& s,
                          CountEngine engine = CountEngine::kAuto) {
  detail::check_arity(eq);
  i128 total = 0;
  for (const EqualityPattern& pat : equality_patterns(eq)) {
    i64 moebius = 1;
    for (const auto& block : pat.blocks) {
      const int sz = static_cast<int>(block.size());
      i64 factorial = 1;
      for (int i = 2; i < sz; ++i) factorial *= i;
      moebius *= (sz % 2 == 1 ? 1 : -1) * factorial;
    }
    total += i128{moebius} * detail::count_all_pattern(pat.reduced_coeffs, s, engine);
  }
  require(total >= 0, "distinct count came out negative");
  return narrow_i64(total, "distinct count");
}

}  // namespace supersat
