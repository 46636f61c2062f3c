#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "supersat/common.hpp"
#include "supersat/counting.hpp"
#include "supersat/equation.hpp"

namespace supersat {

struct ExtremalRecord {
  i64 n = 0;
  i64 max_free_size = 0;
  std::vector<i64> witness;
};

struct ThresholdEstimate {
  Ratio epsilon;
  i64 horizon = 0;
  i64 r_hat = 0;  // horizon+1 when the condition never stabilizes
  bool certified = false;
  std::vector<i64> max_free_table;  // index n, entry max_free_size(n)
};

struct MinCountEstimate {
  i64 n = 0;
  i64 m = 0;
  i64 min_count = 0;
  bool exact = false;
  std::vector<i64> witness;
};

enum class SearchMode { kExact, kAnneal };

inline constexpr i64 kDefaultExhaustionLimit = 40;

namespace detail {

// Ordered distinct tuples that use the value v exactly once, with the other
// entries drawn from the indicator `ind` over [1,n] (which must not contain
// v). Entries of a distinct tuple repeat nowhere, so summing over the
// position of v counts each tuple once.
inline i64 count_involving(const std::vector<i64>& coeffs,
                           const std::vector<std::uint8_t>& ind, i64 n, i64 v,
                           bool early_exit) {
  const int k = static_cast<int>(coeffs.size());
  i64 found = 0;

  auto last_member = [&](i128 partial, i64 c_last, i64 x, i64 y) -> bool {
    const i128 num = -partial;
    if (num % c_last != 0) return false;
    const i128 w = num / c_last;
    if (w < 1 || w > n) return false;
    const i64 wi = static_cast<i64>(w);
    if (!ind[static_cast<std::size_t>(wi)]) return false;
    return wi != x && wi != y;
  };

  for (int j = 0; j < k; ++j) {
    std::vector<int> rest;
    for (int i = 0; i < k; ++i)
      if (i != j) rest.push_back(i);
    const i128 base = i128{coeffs[j]} * v;
    if (k == 3) {
      for (i64 x = 1; x <= n; ++x) {
        if (!ind[static_cast<std::size_t>(x)]) continue;
        if (last_member(base + i128{coeffs[rest[0]]} * x, coeffs[rest[1]], x, v)) {
          if (early_exit) return 1;
          ++found;
        }
      }
    } else {
      for (i64 x = 1; x <= n; ++x) {
        if (!ind[static_cast<std::size_t>(x)]) continue;
        const i128 bx = base + i128{coeffs[rest[0]]} * x;
        for (i64 y = 1; y <= n; ++y) {
          if (!ind[static_cast<std::size_t>(y)] || y == x) continue;
          if (last_member(bx + i128{coeffs[rest[1]]} * y, coeffs[rest[2]], x, y)) {
            if (early_exit) return 1;
            ++found;
          }
        }
      }
    }
  }
  return found;
}

inline u128 binomial_saturating(i64 n, i64 m, u128 cap) {
  if (m < 0 || m > n) return 0;
  m = std::min(m, n - m);
  u128 r = 1;
  for (i64 i = 1; i <= m; ++i) {
    r = r * static_cast<u128>(n - m + i) / static_cast<u128>(i);
    if (r > cap) return cap + 1;
  }
  return r;
}

}  // namespace detail

// Exact maximum solution-free subset of [1,n], with the lexicographically
// smallest optimum as witness. Depth-first over elements 1..n, include branch
// first: the first set reaching the optimum size in that order is exactly the
// canonical witness, so no second pass is needed.
inline ExtremalRecord max_free_subset(const InvariantEquation& eq, i64 n,
                                      i64 limit = kDefaultExhaustionLimit) {
  detail::check_arity(eq);
  if (n < 0) throw config_error("max_free_subset: n must be nonnegative");
  if (n > limit) throw budget_error("max_free_subset: n exceeds exhaustion limit");

  std::vector<std::uint8_t> ind(static_cast<std::size_t>(n + 1), 0);
  std::vector<i64> chosen;
  ExtremalRecord rec{n, 0, {}};

  auto can_add = [&](i64 v) {
    return detail::count_involving(eq.coeffs(), ind, n, v, true) == 0;
  };

  auto dfs = [&](auto&& self, i64 e) -> void {
    if (e > n) return;
    if (static_cast<i64>(chosen.size()) + (n - e + 1) <= rec.max_free_size) return;
    if (can_add(e)) {
      ind[static_cast<std::size_t>(e)] = 1;
      chosen.push_back(e);
      if (static_cast<i64>(chosen.size()) > rec.max_free_size) {
        rec.max_free_size = static_cast<i64>(chosen.size());
        rec.witness = chosen;
      }
      self(self, e + 1);
      chosen.pop_back();
      ind[static_cast<std::size_t>(e)] = 0;
    }
    if (static_cast<i64>(chosen.size()) + (n - e) <= rec.max_free_size) return;
    self(self, e + 1);
  };
  dfs(dfs, 1);
  return rec;
}

// Finite-horizon estimate of the Turan threshold R_E(eps): the smallest n0
// such that max_free_size(n) < ceil(eps*n) for every n in [n0, horizon].
// A universal claim over all n >= R is not finitely checkable, so the result
// carries the horizon and a certification flag instead.
inline ThresholdEstimate turan_threshold(const InvariantEquation& eq, Ratio epsilon,
                                         i64 horizon,
                                         i64 limit = kDefaultExhaustionLimit) {
  if (epsilon.num == 0 || Ratio(1, 1) < epsilon)
    throw config_error("turan_threshold: epsilon must be in (0,1]");
  if (horizon < 1) throw config_error("turan_threshold: horizon must be positive");
  if (horizon > limit) throw budget_error("turan_threshold: horizon exceeds exhaustion limit");

  ThresholdEstimate est;
  est.epsilon = epsilon;
  est.horizon = horizon;
  est.max_free_table.assign(static_cast<std::size_t>(horizon + 1), 0);
  for (i64 n = 1; n <= horizon; ++n)
    est.max_free_table[static_cast<std::size_t>(n)] = max_free_subset(eq, n, limit).max_free_size;

  i64 n = horizon;
  while (n >= 1 && est.max_free_table[static_cast<std::size_t>(n)] < epsilon.ceil_mul(n))
    --n;
  est.r_hat = n + 1;
  est.certified = est.r_hat < horizon;
  return est;
}

// Smallest distinct-solution count over m-subsets of [1,n]. Exact mode
// enumerates combinations in lexicographic order (first strict improvement
// keeps the canonical witness); anneal mode is a seeded local search whose
// result is an upper bound on the true minimum.
inline MinCountEstimate min_solution_count(const InvariantEquation& eq, i64 n, i64 m,
                                           SearchMode mode, i64 budget, u64 seed) {
  detail::check_arity(eq);
  if (m < 0 || m > n) throw config_error("min_solution_count: need 0 <= m <= n");
  if (budget < 1) throw config_error("min_solution_count: budget must be positive");

  MinCountEstimate est{n, m, 0, false, {}};

  if (mode == SearchMode::kExact) {
    if (detail::binomial_saturating(n, m, static_cast<u128>(budget)) >
        static_cast<u128>(budget))
      throw budget_error("min_solution_count: C(n,m) exceeds enumeration budget");
    est.exact = true;
    if (m == 0) return est;

    std::vector<i64> comb(static_cast<std::size_t>(m));
    for (i64 i = 0; i < m; ++i) comb[static_cast<std::size_t>(i)] = i + 1;
    i64 best = -1;
    std::vector<i64> best_wit;
    for (;;) {
      const GroundSet s = GroundSet::interval(n, comb);
      const i64 c = count_distinct(eq, s);
      if (best < 0 || c < best) {
        best = c;
        best_wit = comb;
        if (best == 0) break;
      }
      // next combination
      i64 i = m - 1;
      while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - (m - 1 - i)) --i;
      if (i < 0) break;
      ++comb[static_cast<std::size_t>(i)];
      for (i64 j = i + 1; j < m; ++j)
        comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    }
    est.min_count = best;
    est.witness = best_wit;
    return est;
  }

  // Simulated annealing: single-element swaps, geometric cooling, energy
  // maintained incrementally from the swap deltas.
  Rng rng(splitmix64(seed));
  std::vector<std::uint8_t> ind(static_cast<std::size_t>(n + 1), 0);
  std::vector<i64> mem, non;
  {
    std::vector<i64> pool(static_cast<std::size_t>(n));
    for (i64 i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i + 1;
    for (i64 i = 0; i < m; ++i) {
      const i64 j = i + static_cast<i64>(rng.below(static_cast<u64>(n - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    for (i64 i = 0; i < n; ++i) {
      if (i < m) {
        mem.push_back(pool[static_cast<std::size_t>(i)]);
        ind[static_cast<std::size_t>(pool[static_cast<std::size_t>(i)])] = 1;
      } else {
        non.push_back(pool[static_cast<std::size_t>(i)]);
      }
    }
  }

  i64 energy = count_distinct(eq, GroundSet::interval(n, mem));
  i64 best = energy;
  std::vector<i64> best_wit = mem;

  if (m == 0 || m == n || non.empty()) {
    est.min_count = energy;
    est.witness = mem;
    est.exact = (m == 0 || m == n);
    std::sort(est.witness.begin(), est.witness.end());
    return est;
  }

  const double t0 = std::max<double>(1.0, static_cast<double>(energy) * 0.5);
  const double t1 = 0.05;
  const double alpha = std::pow(t1 / t0, 1.0 / static_cast<double>(budget));
  double temp = t0;

  for (i64 it = 0; it < budget && best > 0; ++it, temp *= alpha) {
    const std::size_t ui = static_cast<std::size_t>(rng.below(mem.size()));
    const std::size_t vi = static_cast<std::size_t>(rng.below(non.size()));
    const i64 u = mem[ui], v = non[vi];

    ind[static_cast<std::size_t>(u)] = 0;
    const i64 lost = detail::count_involving(eq.coeffs(), ind, n, u, false);
    const i64 gain = detail::count_involving(eq.coeffs(), ind, n, v, false);
    const i64 delta = gain - lost;

    const bool accept =
        delta <= 0 || rng.unit() < std::exp(-static_cast<double>(delta) / temp);
    if (accept) {
      ind[static_cast<std::size_t>(v)] = 1;
      mem[ui] = v;
      non[vi] = u;
      energy += delta;
      if (energy < best) {
        best = energy;
        best_wit = mem;
      }
    } else {
      ind[static_cast<std::size_t>(u)] = 1;
    }
  }

  est.min_count = best;
  est.witness = best_wit;
  std::sort(est.witness.begin(), est.witness.end());
  return est;
}

}  // namespace supersat
