#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "supersat/common.hpp"
#include "supersat/counting.hpp"
#include "supersat/encoding.hpp"
#include "supersat/equation.hpp"
#include "supersat/extremal.hpp"
#include "supersat/geometry.hpp"
#include "supersat/modular.hpp"

namespace supersat {

// One random affine map f_b(x) = b_0 + sum b_i x_i over F_p.
struct AffineSample {
  std::vector<i64> b;  // (b_0, ..., b_d)
  i64 p = 0;
};

struct ParamValidity {
  bool eq2_upper = false;  // t^d <= (1/eps)^(2C)
  bool eq2_lower = false;  // t^d >= (2 d t^2 a^d / eps)^C
  bool chebyshev = false;  // slice bound t^(d-2)/d >= 8/eps
};

struct AmplifierParams {
  double epsilon = 0.5;
  double C = 1.0;
  i64 a_sum = 4;
  i64 t = 2;
  i64 d = 2;
  i64 trials = 10000;
  u64 seed = 0;
  bool full_enum = false;
  int threads = 1;
  bool overridden = false;
  ParamValidity validity;
};

// Asymptotic parameter recipe t = 2^sqrt(log 1/eps), d = 2C sqrt(log 1/eps),
// rounded into integers, or a caller override. Desk-scale eps rarely
// satisfies the eq2_lower inequality; the flags report which conditions hold
// instead of refusing to run.
inline AmplifierParams choose_parameters(double epsilon, double C, i64 a_sum,
                                         std::optional<std::pair<i64, i64>> override_td = {}) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw config_error("choose_parameters: epsilon must be in (0,1)");
  if (C < 1.0) throw config_error("choose_parameters: C must be >= 1");
  if (a_sum < 2) throw config_error("choose_parameters: a_sum must be >= 2");

  AmplifierParams params;
  params.epsilon = epsilon;
  params.C = C;
  params.a_sum = a_sum;

  const double s = std::sqrt(std::log2(1.0 / epsilon));
  if (override_td) {
    params.t = override_td->first;
    params.d = override_td->second;
    params.overridden = true;
    if (params.t < 2 || params.d < 2)
      throw config_error("choose_parameters: override needs t >= 2 and d >= 2");
    detail::encode_base(a_sum, params.t, params.d);  // throws if the encoder would overflow
  } else {
    const i64 texp = std::max<i64>(1, std::llround(s));
    if (texp > 40) throw budget_error("choose_parameters: epsilon too small for desk scale");
    params.t = i64{1} << texp;
    params.d = std::max<i64>(2, std::llround(2.0 * C * s));
  }

  const double log_td = static_cast<double>(params.d) * std::log2(static_cast<double>(params.t));
  const double log_inv_eps = std::log2(1.0 / epsilon);
  params.validity.eq2_upper = log_td <= 2.0 * C * log_inv_eps + 1e-9;
  const double log_lower =
      C * (1.0 + std::log2(static_cast<double>(params.d)) +
           2.0 * std::log2(static_cast<double>(params.t)) +
           static_cast<double>(params.d) * std::log2(static_cast<double>(a_sum)) +
           log_inv_eps);
  params.validity.eq2_lower = log_td >= log_lower - 1e-9;
  params.validity.chebyshev =
      log_td - 2.0 * std::log2(static_cast<double>(params.t)) -
          std::log2(static_cast<double>(params.d)) >=
      std::log2(8.0 / epsilon) - 1e-9;
  return params;
}

inline i64 eval_affine(const AffineSample& sample, const LatticePoint& x) {
  require(sample.b.size() == x.size() + 1, "affine sample arity mismatch");
  i128 acc = sample.b[0];
  for (std::size_t i = 0; i < x.size(); ++i) acc += i128{sample.b[i + 1]} * x[i];
  return mod_norm(acc, sample.p);
}

// The points of X whose image under f_b lands in S.
inline std::vector<LatticePoint> fiber(const std::vector<LatticePoint>& X,
                                       const AffineSample& sample, const GroundSet& S) {
  std::vector<LatticePoint> out;
  for (const auto& x : X)
    if (S.contains(eval_affine(sample, x))) out.push_back(x);
  return out;
}

struct GoodnessStats {
  i64 trials = 0;
  i64 good_count = 0;
  i64 fiber_sum = 0;
  double good_fraction = 0.0;
  double mean_fiber = 0.0;
};

namespace detail {

inline u128 pow_u128(i64 base, i64 exp) {
  u128 r = 1;
  for (i64 i = 0; i < exp; ++i) r *= static_cast<u128>(base);
  return r;
}

inline std::vector<i64> sample_digits(i64 idx_or_seed, i64 p, i64 count, bool full_enum,
                                      u64 seed) {
  std::vector<i64> b(static_cast<std::size_t>(count));
  if (full_enum) {
    u64 v = static_cast<u64>(idx_or_seed);
    for (i64 i = 0; i < count; ++i) {
      b[static_cast<std::size_t>(i)] = static_cast<i64>(v % static_cast<u64>(p));
      v /= static_cast<u64>(p);
    }
  } else {
    Rng rng(stream_seed(seed, static_cast<u64>(idx_or_seed)));
    for (i64 i = 0; i < count; ++i)
      b[static_cast<std::size_t>(i)] = static_cast<i64>(rng.below(static_cast<u64>(p)));
  }
  return b;
}

// Partition [0,total) across workers; each worker owns an accumulator and the
// per-trial randomness depends only on the trial index, so the merged result
// is identical for every thread count.
template <class Accum, class TrialFn>
Accum run_trials(i64 total, int threads, const TrialFn& fn) {
  threads = std::clamp(threads, 1, 256);
  if (threads == 1 || total < 2 * threads) {
    Accum acc;
    for (i64 i = 0; i < total; ++i) fn(i, acc);
    return acc;
  }
  std::vector<Accum> parts(static_cast<std::size_t>(threads));
  std::vector<std::thread> pool;
  const i64 chunk = (total + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    const i64 lo = w * chunk;
    const i64 hi = std::min<i64>(total, lo + chunk);
    pool.emplace_back([&fn, &parts, w, lo, hi] {
      for (i64 i = lo; i < hi; ++i) fn(i, parts[static_cast<std::size_t>(w)]);
    });
  }
  for (auto& th : pool) th.join();
  Accum acc;
  for (auto& part : parts) acc.merge(part);
  return acc;
}

// Exact goodness test: |fiber| >= eps*|X|/2 with eps = |S|/p, compared by
// cross multiplication.
inline bool is_good(i64 fiber_size, i64 set_size, i64 cap_size, i64 p) {
  return i128{2} * p * fiber_size >= i128{set_size} * cap_size;
}

}  // namespace detail

// Empirical goodness statistics over sampled or fully enumerated b.
inline GoodnessStats goodness_stats(const GroundSet& S, const std::vector<LatticePoint>& X,
                                    i64 trials, u64 seed, bool full_enum = false) {
  if (S.universe() != GroundSet::Universe::kPrimeField)
    throw config_error("goodness_stats: S must live over a prime field");
  if (X.empty()) throw config_error("goodness_stats: X is empty");
  const i64 p = S.universe_size();
  const i64 d = static_cast<i64>(X.front().size());
  if (full_enum) {
    const u128 space = detail::pow_u128(p, d + 1);
    if (space > (u128{1} << 26)) throw budget_error("goodness_stats: full enumeration too large");
    trials = static_cast<i64>(space);
  }
  if (trials < 1) throw config_error("goodness_stats: need at least one trial");

  GoodnessStats stats;
  stats.trials = trials;
  AffineSample sample;
  sample.p = p;
  for (i64 i = 0; i < trials; ++i) {
    sample.b = detail::sample_digits(i, p, d + 1, full_enum, seed);
    i64 fs = 0;
    for (const auto& x : X)
      if (S.contains(eval_affine(sample, x))) ++fs;
    stats.fiber_sum += fs;
    if (detail::is_good(fs, S.count(), static_cast<i64>(X.size()), p)) ++stats.good_count;
  }
  stats.good_fraction = static_cast<double>(stats.good_count) / static_cast<double>(trials);
  stats.mean_fiber = static_cast<double>(stats.fiber_sum) / static_cast<double>(trials);
  return stats;
}

// Four distinct points of X satisfying the equation in every coordinate.
struct HelpfulTuple {
  std::vector<LatticePoint> x;  // size 4
};

namespace detail {

// Encoded-value order: base-(a t) positional values grow with the reversed
// digit sequence, so compare most-significant (last) coordinate first.
inline bool encoded_less(const LatticePoint& a, const LatticePoint& b) {
  for (std::size_t i = a.size(); i-- > 0;)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

}  // namespace detail

// Meet-in-the-middle search for a helpful tuple inside a fiber: hash
// a_3 x^3 + a_4 x^4 coordinatewise and probe with -(a_1 x^1 + a_2 x^2).
// Returns the lexicographically smallest tuple under encoded-value order;
// absence is a value, not an error.
inline std::optional<HelpfulTuple> find_helpful_tuple(const InvariantEquation& eq,
                                                      const std::vector<LatticePoint>& pts) {
  if (eq.k() != 4) throw config_error("find_helpful_tuple: equation must have k=4");
  const std::size_t m = pts.size();
  if (m < 4) return std::nullopt;
  if (m > 4096) throw budget_error("find_helpful_tuple: fiber too large");
  const std::size_t d = pts.front().size();
  const auto& a = eq.coeffs();

  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return detail::encoded_less(pts[i], pts[j]);
  });

  std::map<std::vector<i64>, std::vector<std::pair<std::size_t, std::size_t>>> half;
  std::vector<i64> key(d);
  for (const std::size_t i3 : order)
    for (const std::size_t i4 : order) {
      if (i3 == i4) continue;
      for (std::size_t c = 0; c < d; ++c) key[c] = a[2] * pts[i3][c] + a[3] * pts[i4][c];
      half[key].emplace_back(i3, i4);
    }

  for (const std::size_t i1 : order)
    for (const std::size_t i2 : order) {
      if (i1 == i2) continue;
      for (std::size_t c = 0; c < d; ++c) key[c] = -(a[0] * pts[i1][c] + a[1] * pts[i2][c]);
      const auto it = half.find(key);
      if (it == half.end()) continue;
      for (const auto& [i3, i4] : it->second) {
        if (i3 == i1 || i3 == i2 || i4 == i1 || i4 == i2) continue;
        return HelpfulTuple{{pts[i1], pts[i2], pts[i3], pts[i4]}};
      }
    }
  return std::nullopt;
}

// Same search routed through the base-(a t) integer encoding; the no-carry
// lemma makes the two routes agree, which tests assert.
inline std::optional<HelpfulTuple> find_helpful_tuple_encoded(
    const InvariantEquation& eq, const std::vector<LatticePoint>& pts, i64 t) {
  if (eq.k() != 4) throw config_error("find_helpful_tuple_encoded: equation must have k=4");
  const std::size_t m = pts.size();
  if (m < 4) return std::nullopt;
  if (m > 4096) throw budget_error("find_helpful_tuple_encoded: fiber too large");
  const auto& a = eq.coeffs();

  std::vector<i64> enc(m);
  for (std::size_t i = 0; i < m; ++i) enc[i] = encode_point(pts[i], eq.a_sum(), t).value;

  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return enc[i] < enc[j]; });

  std::map<i128, std::vector<std::pair<std::size_t, std::size_t>>> half;
  for (const std::size_t i3 : order)
    for (const std::size_t i4 : order) {
      if (i3 == i4) continue;
      half[i128{a[2]} * enc[i3] + i128{a[3]} * enc[i4]].emplace_back(i3, i4);
    }

  for (const std::size_t i1 : order)
    for (const std::size_t i2 : order) {
      if (i1 == i2) continue;
      const auto it = half.find(-(i128{a[0]} * enc[i1] + i128{a[1]} * enc[i2]));
      if (it == half.end()) continue;
      for (const auto& [i3, i4] : it->second) {
        if (i3 == i1 || i3 == i2 || i4 == i1 || i4 == i2) continue;
        return HelpfulTuple{{pts[i1], pts[i2], pts[i3], pts[i4]}};
      }
    }
  return std::nullopt;
}

// Exhaustive ordered count of helpful 4-tuples in X.
inline i64 count_helpful_tuples(const InvariantEquation& eq,
                                const std::vector<LatticePoint>& pts) {
  if (eq.k() != 4) throw config_error("count_helpful_tuples: equation must have k=4");
  const std::size_t m = pts.size();
  if (i128{m} * m * m > (i128{1} << 27))
    throw budget_error("count_helpful_tuples: X too large for cubic scan");
  const std::size_t d = m == 0 ? 0 : pts.front().size();
  const auto& a = eq.coeffs();

  std::map<LatticePoint, std::size_t> index;
  for (std::size_t i = 0; i < m; ++i) index[pts[i]] = i;

  i64 count = 0;
  LatticePoint x4(d);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      for (std::size_t l = 0; l < m; ++l) {
        if (l == i || l == j) continue;
        bool ok = true;
        for (std::size_t c = 0; c < d && ok; ++c) {
          const i64 num = -(a[0] * pts[i][c] + a[1] * pts[j][c] + a[2] * pts[l][c]);
          if (num % a[3] != 0) {
            ok = false;
            break;
          }
          x4[c] = num / a[3];
        }
        if (!ok) continue;
        const auto it = index.find(x4);
        if (it == index.end()) continue;
        const std::size_t q = it->second;
        if (q == i || q == j || q == l) continue;
        ++count;
      }
    }
  return count;
}

// Everything a run of either amplification pipeline reports. Serialized to
// JSON by the io layer; byte-identical for identical (config, seed)
// regardless of worker count.
struct AmplifierReport {
  std::string equation;
  std::string pipeline;  // "varnavides3" or "amplifier4"
  i64 p = 0;
  i64 set_size = 0;
  i64 eps_num = 0, eps_den = 1;  // exact density |S|/p
  double epsilon = 0.0;
  double C = 1.0;
  i64 t = 0;  // varnavides: R
  i64 d = 0;  // varnavides: 1
  i64 cap_size = 0;
  i64 trials = 0;
  bool full_enum = false;
  u64 seed = 0;

  i64 good_count = 0;
  i64 fiber_sum = 0;
  i64 extraction_failures = 0;
  i64 degenerate_images = 0;
  i64 solutions_emitted = 0;
  i64 distinct_solutions = 0;
  i64 validity_failures = 0;
  i64 helpful_tuple_count = -1;  // -1: not computed
  i64 max_multiplicity = 0;      // full enumeration only
  double good_fraction = 0.0;
  double mean_fiber = 0.0;

  double theoretical_floor = 0.0;  // over the full b-space
  i64 floor_num = 0, floor_den = 0;  // exact floor for the 3-variable run
  double floor_sampled = 0.0;        // floor scaled by the sampled fraction
  double dedup_bound = 0.0;
  bool dedup_ok = true;
  bool chebyshev_ok = true;

  std::set<std::vector<i64>> solutions;
};

namespace detail {

struct RunAccum {
  i64 good = 0;
  i64 fiber_sum = 0;
  i64 extraction_failures = 0;
  i64 degenerate = 0;
  i64 emitted = 0;
  i64 validity_failures = 0;
  std::set<std::vector<i64>> sols;
  std::map<std::vector<i64>, i64> multiplicity;
  bool track_multiplicity = false;

  void merge(RunAccum& o) {
    good += o.good;
    fiber_sum += o.fiber_sum;
    extraction_failures += o.extraction_failures;
    degenerate += o.degenerate;
    emitted += o.emitted;
    validity_failures += o.validity_failures;
    sols.merge(o.sols);
    for (const auto& [k, v] : o.multiplicity) multiplicity[k] += v;
  }
};

}  // namespace detail

// Varnavides's 3-variable amplification: affine images of [R] inside S.
// R is supplied externally (typically a certified turan_threshold at density
// eps/2); the Chebyshev guard eps*R >= 8 is a hard requirement here.
inline AmplifierReport run_varnavides3(const InvariantEquation& eq, const GroundSet& S,
                                       i64 R, i64 trials, u64 seed,
                                       bool full_enum = false, int threads = 1) {
  if (eq.k() != 3) throw config_error("run_varnavides3: equation must have k=3");
  if (S.universe() != GroundSet::Universe::kPrimeField)
    throw config_error("run_varnavides3: S must live over a prime field");
  const i64 p = S.universe_size();
  if (R < 3 || R >= p) throw config_error("run_varnavides3: need 3 <= R < p");
  if (i128{S.count()} * R < i128{8} * p)
    throw config_error("run_varnavides3: Chebyshev guard eps*R >= 8 violated");

  if (full_enum) {
    const u128 space = detail::pow_u128(p, 2);
    if (space > (u128{1} << 26)) throw budget_error("run_varnavides3: p^2 too large to enumerate");
    trials = static_cast<i64>(space);
  }
  if (trials < 1) throw config_error("run_varnavides3: need at least one trial");

  const auto& a = eq.coeffs();
  const i64 set_size = S.count();

  const auto trial_fn = [&](i64 idx, detail::RunAccum& acc) {
    const auto b = detail::sample_digits(idx, p, 2, full_enum, seed);
    // fiber of X = [R] in ascending order
    std::vector<i64> fib;
    std::vector<std::uint8_t> in_fib(static_cast<std::size_t>(R + 1), 0);
    for (i64 x = 1; x <= R; ++x) {
      const i64 img = mod_norm(i128{b[1]} * x + b[0], p);
      if (S.contains(img)) {
        fib.push_back(x);
        in_fib[static_cast<std::size_t>(x)] = 1;
      }
    }
    acc.fiber_sum += static_cast<i64>(fib.size());
    const bool good = detail::is_good(static_cast<i64>(fib.size()), set_size, R, p);
    if (good) ++acc.good;

    // lex-smallest ordered distinct solution over the integers in the fiber
    std::optional<std::array<i64, 3>> found;
    for (const i64 x1 : fib) {
      for (const i64 x2 : fib) {
        if (x2 == x1) continue;
        const i128 num = -(i128{a[0]} * x1 + i128{a[1]} * x2);
        if (num % a[2] != 0) continue;
        const i128 w = num / a[2];
        if (w < 1 || w > R) continue;
        const i64 x3 = static_cast<i64>(w);
        if (!in_fib[static_cast<std::size_t>(x3)] || x3 == x1 || x3 == x2) continue;
        found = {x1, x2, x3};
        break;
      }
      if (found) break;
    }

    if (!found) {
      if (good) ++acc.extraction_failures;
      return;
    }
    std::vector<i64> s(3);
    for (int i = 0; i < 3; ++i) s[static_cast<std::size_t>(i)] =
        mod_norm(i128{b[1]} * (*found)[static_cast<std::size_t>(i)] + b[0], p);
    if (s[0] == s[1] || s[0] == s[2] || s[1] == s[2]) {
      ++acc.degenerate;  // b_1 = 0 collapses the images
      return;
    }
    if (eval_form(eq, s, p) != 0 || !S.contains(s[0]) || !S.contains(s[1]) ||
        !S.contains(s[2])) {
      ++acc.validity_failures;
      return;
    }
    ++acc.emitted;
    if (full_enum) acc.multiplicity[s] += 1;
    acc.sols.insert(std::move(s));
  };

  auto acc = detail::run_trials<detail::RunAccum>(trials, threads, trial_fn);

  AmplifierReport rep;
  rep.equation = eq.text();
  rep.pipeline = "varnavides3";
  rep.p = p;
  rep.set_size = set_size;
  const Ratio eps(set_size, p);
  rep.eps_num = eps.num;
  rep.eps_den = eps.den;
  rep.epsilon = eps.value();
  rep.t = R;
  rep.d = 1;
  rep.cap_size = R;
  rep.trials = trials;
  rep.full_enum = full_enum;
  rep.seed = seed;
  rep.good_count = acc.good;
  rep.fiber_sum = acc.fiber_sum;
  rep.extraction_failures = acc.extraction_failures;
  rep.degenerate_images = acc.degenerate;
  rep.solutions_emitted = acc.emitted;
  rep.distinct_solutions = static_cast<i64>(acc.sols.size());
  rep.validity_failures = acc.validity_failures;
  rep.good_fraction = static_cast<double>(acc.good) / static_cast<double>(trials);
  rep.mean_fiber = static_cast<double>(acc.fiber_sum) / static_cast<double>(trials);
  rep.chebyshev_ok = true;

  // Each (solution, x-triple) pair pins down b uniquely, so per-solution
  // multiplicity is bounded by the distinct-solution count of [R].
  rep.helpful_tuple_count = count_distinct(eq, GroundSet::full_interval(R));
  rep.dedup_bound = static_cast<double>(rep.helpful_tuple_count);
  rep.floor_num = checked_mul(p, p);
  rep.floor_den = checked_mul(2, checked_mul(R, R));
  rep.theoretical_floor = static_cast<double>(rep.floor_num) / static_cast<double>(rep.floor_den);
  rep.floor_sampled = full_enum ? rep.theoretical_floor
                                : static_cast<double>(trials) /
                                      (2.0 * static_cast<double>(R) * static_cast<double>(R));
  if (full_enum) {
    for (const auto& [sol, mult] : acc.multiplicity)
      rep.max_multiplicity = std::max(rep.max_multiplicity, mult);
    rep.dedup_ok = static_cast<double>(rep.max_multiplicity) <= rep.dedup_bound;
  }
  rep.solutions = std::move(acc.sols);
  return rep;
}

// The 4-variable pipeline: sphere-cap fibers, helpful tuples, affine images.
// Unlike the 3-variable run, the Chebyshev guard is reported rather than
// enforced so that small override parameters remain runnable.
inline AmplifierReport run_amplifier4(const InvariantEquation& eq, const GroundSet& S,
                                      const AmplifierParams& params,
                                      const std::vector<LatticePoint>* cap_override = nullptr) {
  if (eq.k() != 4) throw config_error("run_amplifier4: equation must have k=4");
  if (S.universe() != GroundSet::Universe::kPrimeField)
    throw config_error("run_amplifier4: S must live over a prime field");
  const i64 p = S.universe_size();

  std::vector<LatticePoint> cap_points;
  if (cap_override) {
    cap_points = *cap_override;
  } else {
    cap_points = sphere_cap(params.t, params.d).points;
  }
  if (cap_points.empty()) throw config_error("run_amplifier4: empty cap");
  const i64 d = static_cast<i64>(cap_points.front().size());
  for (const auto& pt : cap_points)
    for (const i64 c : pt)
      if (c < 1 || c >= p)
        throw config_error("run_amplifier4: cap coordinates must lie in [1, p)");
  detail::encode_base(eq.a_sum(), params.t, d);  // encoder overflow guard

  i64 trials = params.trials;
  if (params.full_enum) {
    const u128 space = detail::pow_u128(p, d + 1);
    if (space > (u128{1} << 26))
      throw budget_error("run_amplifier4: p^(d+1) too large to enumerate");
    trials = static_cast<i64>(space);
  }
  if (trials < 1) throw config_error("run_amplifier4: need at least one trial");

  const i64 set_size = S.count();
  const i64 cap_size = static_cast<i64>(cap_points.size());
  const auto& a = eq.coeffs();

  const auto trial_fn = [&](i64 idx, detail::RunAccum& acc) {
    const auto bdig = detail::sample_digits(idx, p, d + 1, params.full_enum, params.seed);
    const AffineSample sample{bdig, p};

    std::vector<LatticePoint> fib;
    for (const auto& x : cap_points)
      if (S.contains(eval_affine(sample, x))) fib.push_back(x);
    acc.fiber_sum += static_cast<i64>(fib.size());
    if (!detail::is_good(static_cast<i64>(fib.size()), set_size, cap_size, p)) return;
    ++acc.good;

    const auto tuple = find_helpful_tuple(eq, fib);
    if (!tuple) {
      ++acc.extraction_failures;
      return;
    }

    // Transfer identity: sum_j a_j f_b(x^j) = sum_i b_i (sum_j a_j x^j_i),
    // and the right side vanishes because the tuple is helpful.
    std::vector<i64> s(4);
    for (int j = 0; j < 4; ++j)
      s[static_cast<std::size_t>(j)] = eval_affine(sample, tuple->x[static_cast<std::size_t>(j)]);
    i128 rhs = 0;
    for (i64 c = 0; c < d; ++c) {
      i128 coord = 0;
      for (int j = 0; j < 4; ++j)
        coord += i128{a[static_cast<std::size_t>(j)]} *
                 tuple->x[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)];
      rhs += i128{sample.b[static_cast<std::size_t>(c + 1)]} * coord;
    }
    const bool transfer_ok = mod_norm(rhs, p) == eval_form(eq, s, p);
    if (!transfer_ok || eval_form(eq, s, p) != 0) {
      ++acc.validity_failures;
      return;
    }
    bool distinct = true;
    for (int i = 0; i < 4 && distinct; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (s[static_cast<std::size_t>(i)] == s[static_cast<std::size_t>(j)]) {
          distinct = false;
          break;
        }
    if (!distinct) {
      ++acc.degenerate;
      return;
    }
    for (const i64 v : s)
      if (!S.contains(v)) {
        ++acc.validity_failures;
        return;
      }
    ++acc.emitted;
    if (params.full_enum) acc.multiplicity[s] += 1;
    acc.sols.insert(std::move(s));
  };

  auto acc = detail::run_trials<detail::RunAccum>(trials, params.threads, trial_fn);

  AmplifierReport rep;
  rep.equation = eq.text();
  rep.pipeline = "amplifier4";
  rep.p = p;
  rep.set_size = set_size;
  const Ratio eps(set_size, p);
  rep.eps_num = eps.num;
  rep.eps_den = eps.den;
  rep.epsilon = eps.value();
  rep.C = params.C;
  rep.t = params.t;
  rep.d = d;
  rep.cap_size = cap_size;
  rep.trials = trials;
  rep.full_enum = params.full_enum;
  rep.seed = params.seed;
  rep.good_count = acc.good;
  rep.fiber_sum = acc.fiber_sum;
  rep.extraction_failures = acc.extraction_failures;
  rep.degenerate_images = acc.degenerate;
  rep.solutions_emitted = acc.emitted;
  rep.distinct_solutions = static_cast<i64>(acc.sols.size());
  rep.validity_failures = acc.validity_failures;
  rep.good_fraction = static_cast<double>(acc.good) / static_cast<double>(trials);
  rep.mean_fiber = static_cast<double>(acc.fiber_sum) / static_cast<double>(trials);
  rep.chebyshev_ok = i128{set_size} * cap_size >= i128{8} * p;

  if (cap_size <= 400) rep.helpful_tuple_count = count_helpful_tuples(eq, cap_points);
  if (rep.helpful_tuple_count >= 0) {
    double bound = static_cast<double>(rep.helpful_tuple_count);
    for (i64 i = 0; i + 2 < d; ++i) bound *= static_cast<double>(p);
    rep.dedup_bound = bound;
  }
  rep.theoretical_floor = 0.5 * std::pow(rep.epsilon, 8.0 * params.C) *
                          std::pow(static_cast<double>(p), 3.0);
  const double space = std::pow(static_cast<double>(p), static_cast<double>(d + 1));
  rep.floor_sampled =
      params.full_enum ? rep.theoretical_floor
                       : rep.theoretical_floor * static_cast<double>(trials) / space;
  if (params.full_enum) {
    for (const auto& [sol, mult] : acc.multiplicity)
      rep.max_multiplicity = std::max(rep.max_multiplicity, mult);
    rep.dedup_ok = rep.helpful_tuple_count < 0 ||
                   static_cast<double>(rep.max_multiplicity) <= rep.dedup_bound;
  }
  rep.solutions = std::move(acc.sols);
  return rep;
}

// Exact number of affine samples b with f_b(x^i) = s_i for the three given
// points: p^(d+1-rank) when the augmented system is consistent, else 0.
struct AffineFiberCount {
  bool consistent = true;
  int rank = 0;
  bool degenerate = false;  // points not affinely independent
  i64 exponent = 0;         // count = p^exponent when consistent
};

inline AffineFiberCount affine_fiber_count(const std::vector<LatticePoint>& points,
                                           const std::vector<i64>& targets, i64 p, i64 d) {
  if (points.size() != 3 || targets.size() != 3)
    throw config_error("affine_fiber_count: need exactly three points and targets");
  if (!is_prime(p)) throw config_error("affine_fiber_count: p must be prime");
  for (const auto& pt : points) {
    if (static_cast<i64>(pt.size()) != d)
      throw config_error("affine_fiber_count: point dimension mismatch");
    for (const i64 c : pt)
      if (c < 1 || c >= p) throw config_error("affine_fiber_count: coordinates must lie in [1,p)");
  }

  // rows of the augmented system [1 x | s] over F_p
  const i64 cols = d + 2;
  std::vector<std::vector<i64>> mat(3, std::vector<i64>(static_cast<std::size_t>(cols), 0));
  for (int i = 0; i < 3; ++i) {
    mat[static_cast<std::size_t>(i)][0] = 1;
    for (i64 c = 0; c < d; ++c)
      mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(c + 1)] =
          mod_norm(points[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)], p);
    mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(cols - 1)] =
        mod_norm(targets[static_cast<std::size_t>(i)], p);
  }

  int row = 0;
  for (i64 col = 0; col < cols - 1 && row < 3; ++col) {
    int pivot = -1;
    for (int r = row; r < 3; ++r)
      if (mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(mat[static_cast<std::size_t>(row)], mat[static_cast<std::size_t>(pivot)]);
    const i64 inv = mod_inv(mat[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)], p);
    for (i64 c = col; c < cols; ++c)
      mat[static_cast<std::size_t>(row)][static_cast<std::size_t>(c)] =
          mod_mul(mat[static_cast<std::size_t>(row)][static_cast<std::size_t>(c)], inv, p);
    for (int r = 0; r < 3; ++r) {
      if (r == row) continue;
      const i64 f = mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
      if (f == 0) continue;
      for (i64 c = col; c < cols; ++c)
        mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = mod_norm(
            i128{mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]} -
                i128{f} * mat[static_cast<std::size_t>(row)][static_cast<std::size_t>(c)],
            p);
    }
    ++row;
  }

  AffineFiberCount out;
  out.rank = row;
  out.degenerate = row < 3;
  out.consistent = true;
  for (int r = row; r < 3; ++r)
    if (mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(cols - 1)] != 0)
      out.consistent = false;
  out.exponent = out.consistent ? (d + 1 - row) : 0;
  return out;
}

}  // namespace supersat
