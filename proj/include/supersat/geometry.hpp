#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "supersat/common.hpp"
#include "supersat/counting.hpp"
#include "supersat/encoding.hpp"

namespace supersat {

// Lattice points of [1,t]^d on the sphere sum(x_i^2) = r. A sphere slice
// contains no three collinear points, which is what the amplifier needs.
struct SphereCap {
  i64 t = 0;
  i64 d = 0;
  i64 r = 0;
  std::vector<LatticePoint> points;
};

inline constexpr i64 kDefaultGeometryBudget = i64{1} << 24;

namespace detail {

inline i64 pow_checked(i64 base, i64 exp) {
  i64 r = 1;
  for (i64 i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

template <typename Visit>
void for_each_box_point(i64 t, i64 d, Visit&& visit) {
  LatticePoint x(static_cast<std::size_t>(d), 1);
  for (;;) {
    visit(const_cast<const LatticePoint&>(x));
    i64 i = d - 1;
    while (i >= 0 && x[static_cast<std::size_t>(i)] == t) {
      x[static_cast<std::size_t>(i)] = 1;
      --i;
    }
    if (i < 0) break;
    ++x[static_cast<std::size_t>(i)];
  }
}

}  // namespace detail

// Largest sphere slice B_r over r in [d, d*t^2]; ties resolved toward the
// smallest r. The returned size is checked against the pigeonhole bound
// ceil(t^(d-2)/d).
inline SphereCap sphere_cap(i64 t, i64 d, i64 budget = kDefaultGeometryBudget) {
  if (t < 2 || d < 2) throw config_error("sphere_cap requires t >= 2 and d >= 2");
  const i64 total = detail::pow_checked(t, d);
  if (total > budget) throw budget_error("sphere_cap: t^d exceeds enumeration budget");
  const i64 r_max = checked_mul(d, checked_mul(t, t));
  if (r_max + 1 > (i64{1} << 24))
    throw budget_error("sphere_cap: radius histogram too large");

  std::vector<i64> count(static_cast<std::size_t>(r_max + 1), 0);
  detail::for_each_box_point(t, d, [&](const LatticePoint& x) {
    i64 r = 0;
    for (const i64 v : x) r += v * v;
    ++count[static_cast<std::size_t>(r)];
  });

  i64 best_r = d;
  for (i64 r = d; r <= r_max; ++r)
    if (count[static_cast<std::size_t>(r)] > count[static_cast<std::size_t>(best_r)])
      best_r = r;

  SphereCap cap{t, d, best_r, {}};
  cap.points.reserve(static_cast<std::size_t>(count[static_cast<std::size_t>(best_r)]));
  detail::for_each_box_point(t, d, [&](const LatticePoint& x) {
    i64 r = 0;
    for (const i64 v : x) r += v * v;
    if (r == best_r) cap.points.push_back(x);
  });

  const i64 bound = (detail::pow_checked(t, d - 2) + d - 1) / d;
  require(static_cast<i64>(cap.points.size()) >= bound,
          "sphere slice smaller than pigeonhole bound");
  return cap;
}

// Exact collinearity scan: y-x parallel to z-x via pairwise cross products.
inline bool verify_no_three_collinear(const std::vector<LatticePoint>& points,
                                      i64 budget = i64{1} << 27) {
  const std::size_t n = points.size();
  if (n < 3) return true;
  if (i128{n} * n * n > i128{budget})
    throw budget_error("collinearity check exceeds triple budget");
  const std::size_t d = points.front().size();
  std::vector<i64> u(d), v(d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t c = 0; c < d; ++c) u[c] = points[j][c] - points[i][c];
      for (std::size_t k = j + 1; k < n; ++k) {
        for (std::size_t c = 0; c < d; ++c) v[c] = points[k][c] - points[i][c];
        bool parallel = true;
        for (std::size_t a = 0; a < d && parallel; ++a)
          for (std::size_t b = a + 1; b < d && parallel; ++b)
            if (u[a] * v[b] != u[b] * v[a]) parallel = false;
        if (parallel) return false;
      }
    }
  return true;
}

struct BehrendOptions {
  std::optional<i64> t;
  std::optional<i64> d;
  bool sweep = false;  // search all fitting (t,d) for the largest slice
  i64 budget = kDefaultGeometryBudget;
};

struct BehrendResult {
  i64 n = 0;
  i64 t = 0;
  i64 d = 0;
  i64 r = 0;
  i64 cap_size = 0;
  std::vector<i64> values;  // the encoded 3-AP-free subset of [1,n]
};

namespace detail {

// Greatest value that still fits in [1,n] once every digit is encoded:
// t * ((2t)^d - 1) / (2t - 1).
inline i64 behrend_max_encoded(i64 t, i64 d) {
  i128 acc = 0, weight = 1;
  for (i64 i = 0; i < d; ++i) {
    acc += i128{t} * weight;
    weight *= 2 * t;
    if (acc > (i128{1} << 90)) return std::numeric_limits<i64>::max();
  }
  return narrow_i64(acc, "behrend encoded range");
}

inline i64 behrend_best_t(i64 n, i64 d) {
  // largest t with (2t)^d <= n, i.e. floor(n^(1/d) / 2), found exactly
  i64 t = 0;
  while (true) {
    i128 pw = 1;
    bool fits = true;
    for (i64 i = 0; i < d; ++i) {
      pw *= 2 * (t + 1);
      if (pw > n) {
        fits = false;
        break;
      }
    }
    if (!fits) break;
    ++t;
  }
  return t;
}

}  // namespace detail

// Behrend's construction: best sphere slice of [t]^d mapped into [1,n] by
// base-(2t) digits. Digit sums of x+y and 2z stay strictly below the base,
// so an arithmetic progression among encoded values would force three
// collinear points on the sphere. The output is re-checked against the
// distinct-count oracle before returning.
inline BehrendResult behrend_construct(i64 n, const BehrendOptions& opts = {}) {
  if (n < 2) throw config_error("behrend_set requires n >= 2");

  BehrendResult res;
  res.n = n;

  auto encode_all = [](const SphereCap& cap) {
    std::vector<i64> values;
    values.reserve(cap.points.size());
    for (const auto& pt : cap.points)
      values.push_back(encode_point(pt, 2, cap.t).value);
    std::sort(values.begin(), values.end());
    return values;
  };

  auto try_params = [&](i64 t, i64 d) -> std::optional<BehrendResult> {
    if (t < 2 || d < 2) return std::nullopt;
    if (detail::behrend_max_encoded(t, d) > n) return std::nullopt;
    if (detail::pow_checked(t, d) > opts.budget) return std::nullopt;
    const SphereCap cap = sphere_cap(t, d, opts.budget);
    BehrendResult out;
    out.n = n;
    out.t = t;
    out.d = d;
    out.r = cap.r;
    out.cap_size = static_cast<i64>(cap.points.size());
    out.values = encode_all(cap);
    return out;
  };

  std::optional<BehrendResult> built;
  if (opts.t && opts.d) {
    built = try_params(*opts.t, *opts.d);
    if (!built) throw config_error("behrend_set: override (t,d) does not fit [1,n]");
  } else if (opts.sweep) {
    for (i64 d = 2; d <= 16; ++d) {
      for (i64 t = 2;; ++t) {
        auto cand = try_params(t, d);
        if (!cand) break;
        if (!built || cand->cap_size > built->cap_size) built = cand;
      }
    }
  } else {
    i64 d = static_cast<i64>(
        std::ceil(std::sqrt(std::log2(static_cast<double>(n))) - 1e-9));
    for (; d >= 2 && !built; --d) {
      const i64 t = std::max<i64>(detail::behrend_best_t(n, d), 2);
      built = try_params(t, d);
    }
  }

  if (!built) {
    // Too small for any box: {1,2} has no room for a 3-term progression.
    res.t = 0;
    res.d = 0;
    res.r = 0;
    res.values = {1, std::min<i64>(2, n)};
    std::sort(res.values.begin(), res.values.end());
    res.values.erase(std::unique(res.values.begin(), res.values.end()), res.values.end());
    res.cap_size = static_cast<i64>(res.values.size());
  } else {
    res = *built;
  }

  const auto ap = InvariantEquation::parse({1, 1, -2});
  const GroundSet set = GroundSet::interval(n, res.values);
  require(count_distinct(ap, set) == 0, "behrend_set produced a 3-AP");
  return res;
}

inline GroundSet behrend_set(i64 n, const BehrendOptions& opts = {}) {
  return GroundSet::interval(n, behrend_construct(n, opts).values);
}

}  // namespace supersat
