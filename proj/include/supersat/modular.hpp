#pragma once

#include <span>
#include <vector>

#include "supersat/common.hpp"
#include "supersat/equation.hpp"

namespace supersat {

// Deterministic trial division; desk-scale moduli only.
inline bool is_prime(i64 n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (i64 d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

inline i64 mod_norm(i128 v, i64 p) {
  i128 r = v % p;
  if (r < 0) r += p;
  return static_cast<i64>(r);
}

inline i64 mod_mul(i64 a, i64 b, i64 p) { return mod_norm(i128{a} * b, p); }

inline i64 mod_inv(i64 a, i64 p) {
  a = mod_norm(a, p);
  require(a != 0, "mod_inv of zero");
  i64 t = 0, t1 = 1, r = p, r1 = a;
  while (r1 != 0) {
    const i64 q = r / r1;
    t -= q * t1;
    std::swap(t, t1);
    r -= q * r1;
    std::swap(r, r1);
  }
  require(r == 1, "mod_inv: arguments not coprime");
  return mod_norm(t, p);
}

inline i64 mod_pow(i64 base, i64 exp, i64 p) {
  i64 r = 1 % p;
  base = mod_norm(base, p);
  while (exp > 0) {
    if (exp & 1) r = mod_mul(r, base, p);
    base = mod_mul(base, base, p);
    exp >>= 1;
  }
  return r;
}

// Working modulus for lifting [n] solutions: a prime in (a_sum*n, 2*a_sum*n],
// so that |sum a_i x_i| <= a_sum*n < p can never wrap. Bertrand guarantees
// the window is nonempty.
struct PrimeContext {
  i64 n = 0;
  i64 p = 0;
  i64 a_sum = 0;
};

inline PrimeContext choose_prime(i64 n, i64 a_sum) {
  if (n < 2) throw config_error("choose_prime requires n >= 2");
  if (a_sum < 2) throw config_error("choose_prime requires a_sum >= 2");
  const i64 lo = checked_mul(a_sum, n);
  const i64 hi = checked_mul(2, lo);
  // keep all later |a_i|*x products inside i64 with headroom
  checked_mul(checked_mul(a_sum, hi), 2);
  for (i64 q = lo + 1; q <= hi; ++q)
    if (is_prime(q)) return PrimeContext{n, q, a_sum};
  throw invariant_error("no prime in Bertrand window");
}

// sum a_i x_i mod p, representative in [0,p).
inline i64 eval_form(const InvariantEquation& eq, std::span<const i64> tuple, i64 p) {
  if (static_cast<int>(tuple.size()) != eq.k())
    throw config_error("tuple length does not match equation arity");
  i128 acc = 0;
  for (int i = 0; i < eq.k(); ++i) acc += i128{eq.coeffs()[i]} * tuple[i];
  return mod_norm(acc, p);
}

// Exact integer value of the form (no modulus).
inline i128 eval_form_exact(const InvariantEquation& eq, std::span<const i64> tuple) {
  if (static_cast<int>(tuple.size()) != eq.k())
    throw config_error("tuple length does not match equation arity");
  i128 acc = 0;
  for (int i = 0; i < eq.k(); ++i) acc += i128{eq.coeffs()[i]} * tuple[i];
  return acc;
}

// For entries in [1,n] and p > a_sum*n, vanishing mod p is equivalent to
// vanishing over the integers.
inline bool verify_lift(const InvariantEquation& eq, std::span<const i64> tuple,
                        const PrimeContext& ctx) {
  for (const i64 x : tuple)
    if (x < 1 || x > ctx.n) throw config_error("verify_lift: entry outside [1,n]");
  require(ctx.p > checked_mul(ctx.a_sum, ctx.n), "prime context window violated");
  return eval_form(eq, tuple, ctx.p) == 0;
}

}  // namespace supersat
