#pragma once

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "supersat/common.hpp"

namespace supersat {

// A homogeneous linear form sum(a_i * x_i) = 0 whose coefficients sum to
// zero, so the solution set is translation invariant. Immutable once built.
class InvariantEquation {
 public:
  static InvariantEquation parse(std::vector<i64> coeffs) {
    if (coeffs.size() < 3) throw config_error("equation needs at least 3 variables");
    if (coeffs.size() > kMaxVariables)
      throw config_error("equation has too many variables");
    i64 sum = 0;
    i64 mass = 0;
    for (const i64 a : coeffs) {
      if (a == 0) throw config_error("equation coefficients must be nonzero");
      if (std::abs(a) > kMaxCoefficient)
        throw config_error("equation coefficient magnitude too large");
      sum = checked_add(sum, a);
      mass = checked_add(mass, std::abs(a));
    }
    if (sum != 0) throw config_error("equation is not invariant (coefficients must sum to 0)");
    return InvariantEquation(std::move(coeffs), mass);
  }

  // "1,1,-2" -> (1,1,-2)
  static InvariantEquation parse_text(const std::string& text) {
    std::vector<i64> coeffs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) throw config_error("empty coefficient in equation text");
      std::size_t pos = 0;
      const i64 v = std::stoll(item, &pos);
      if (pos != item.size()) throw config_error("bad coefficient: " + item);
      coeffs.push_back(v);
    }
    return parse(std::move(coeffs));
  }

  const std::vector<i64>& coeffs() const { return coeffs_; }
  int k() const { return static_cast<int>(coeffs_.size()); }
  i64 a_sum() const { return a_sum_; }

  // gcd-normalized copy; counting always uses the coefficients as given.
  InvariantEquation canonicalized() const {
    i64 g = 0;
    for (const i64 a : coeffs_) g = std::gcd(g, std::abs(a));
    std::vector<i64> c = coeffs_;
    if (g > 1)
      for (i64& a : c) a /= g;
    return parse(std::move(c));
  }

  std::string text() const {
    std::string out;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(coeffs_[i]);
    }
    return out;
  }

  static constexpr std::size_t kMaxVariables = 12;
  static constexpr i64 kMaxCoefficient = i64{1} << 20;

 private:
  InvariantEquation(std::vector<i64> coeffs, i64 a_sum)
      : coeffs_(std::move(coeffs)), a_sum_(a_sum) {}

  std::vector<i64> coeffs_;
  i64 a_sum_;
};

// One way of forcing variables equal: a set partition of {0,...,k-1} with the
// block-summed coefficients. Feeds the distinct-count Moebius inversion.
struct EqualityPattern {
  std::vector<int> block_of;        // block index per variable (restricted growth)
  std::vector<std::vector<int>> blocks;
  std::vector<i64> reduced_coeffs;  // one per block
};

// All set partitions of the k variables, in restricted-growth-string order.
inline std::vector<EqualityPattern> equality_patterns(const InvariantEquation& eq) {
  const int k = eq.k();
  std::vector<EqualityPattern> out;
  std::vector<int> rgs(k, 0);

  auto emit = [&] {
    EqualityPattern pat;
    pat.block_of = rgs;
    const int nblocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
    pat.blocks.assign(nblocks, {});
    pat.reduced_coeffs.assign(nblocks, 0);
    for (int i = 0; i < k; ++i) {
      pat.blocks[rgs[i]].push_back(i);
      pat.reduced_coeffs[rgs[i]] += eq.coeffs()[i];
    }
    out.push_back(std::move(pat));
  };

  // Enumerate restricted growth strings: rgs[0]=0, rgs[i] <= max(prefix)+1.
  auto rec = [&](auto&& self, int i, int maxv) -> void {
    if (i == k) {
      emit();
      return;
    }
    for (int b = 0; b <= maxv + 1; ++b) {
      rgs[i] = b;
      self(self, i + 1, std::max(maxv, b));
    }
  };
  rec(rec, 1, 0);
  return out;
}

}  // namespace supersat
