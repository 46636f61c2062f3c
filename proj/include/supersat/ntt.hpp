#pragma once

#include <algorithm>
#include <vector>

#include "supersat/common.hpp"

namespace supersat::detail {

// Exact convolution of nonnegative integer sequences. Small products go
// through the schoolbook path; larger ones through a single-prime NTT whose
// modulus 998244353 must strictly dominate every true output coefficient.
// Callers pass a proven a-priori bound; exceeding it is refused, never
// wrapped.

inline constexpr u64 kNttMod = 998244353;  // 119 * 2^23 + 1, primitive root 3
inline constexpr u64 kNttRoot = 3;

inline u64 ntt_pow(u64 b, u64 e) {
  u64 r = 1;
  b %= kNttMod;
  while (e) {
    if (e & 1) r = r * b % kNttMod;
    b = b * b % kNttMod;
    e >>= 1;
  }
  return r;
}

inline void ntt_transform(std::vector<u64>& a, bool invert) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    u64 w = ntt_pow(kNttRoot, (kNttMod - 1) / len);
    if (invert) w = ntt_pow(w, kNttMod - 2);
    for (std::size_t i = 0; i < n; i += len) {
      u64 wn = 1;
      for (std::size_t j = 0; j < len / 2; ++j) {
        const u64 u = a[i + j];
        const u64 v = a[i + j + len / 2] * wn % kNttMod;
        a[i + j] = (u + v) % kNttMod;
        a[i + j + len / 2] = (u + kNttMod - v) % kNttMod;
        wn = wn * w % kNttMod;
      }
    }
  }
  if (invert) {
    const u64 inv_n = ntt_pow(n, kNttMod - 2);
    for (u64& x : a) x = x * inv_n % kNttMod;
  }
}

inline std::vector<u64> conv_schoolbook(const std::vector<u64>& a,
                                        const std::vector<u64>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<u64> out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

inline std::vector<u64> conv_ntt(const std::vector<u64>& a,
                                 const std::vector<u64>& b) {
  const std::size_t need = a.size() + b.size() - 1;
  std::size_t n = 1;
  while (n < need) n <<= 1;
  if (n > (std::size_t{1} << 23))
    throw budget_error("convolution length exceeds NTT capacity");
  std::vector<u64> fa(a.begin(), a.end()), fb(b.begin(), b.end());
  fa.resize(n, 0);
  fb.resize(n, 0);
  ntt_transform(fa, false);
  ntt_transform(fb, false);
  for (std::size_t i = 0; i < n; ++i) fa[i] = fa[i] * fb[i] % kNttMod;
  ntt_transform(fa, true);
  fa.resize(need);
  return fa;
}

// coeff_bound: proven upper bound on every output coefficient.
inline std::vector<u64> exact_convolution(const std::vector<u64>& a,
                                          const std::vector<u64>& b,
                                          u64 coeff_bound) {
  if (a.empty() || b.empty()) return {};
  const u128 work = u128{a.size()} * b.size();
  if (work <= u128{1} << 21) return conv_schoolbook(a, b);
  if (coeff_bound >= kNttMod)
    throw budget_error("convolution coefficients may exceed NTT modulus");
  for (const u64 v : a)
    if (v >= kNttMod) throw budget_error("convolution input exceeds NTT modulus");
  for (const u64 v : b)
    if (v >= kNttMod) throw budget_error("convolution input exceeds NTT modulus");
  return conv_ntt(a, b);
}

}  // namespace supersat::detail
