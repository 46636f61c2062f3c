#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "supersat/encoding.hpp"

using namespace supersat;

TEST_CASE("encode_point frozen values") {
  const auto e1 = encode_point({2, 1}, 4, 3);  // base 12
  CHECK(e1.base == 12);
  CHECK(e1.value == 14);

  const auto e2 = encode_point({1, 1, 1}, 4, 2);  // base 8
  CHECK(e2.base == 8);
  CHECK(e2.value == 73);

  CHECK_THROWS_AS(encode_point({0, 1}, 4, 3), config_error);
  CHECK_THROWS_AS(encode_point({4, 1}, 4, 3), config_error);
}

TEST_CASE("encode rejects parameters that overflow the value range") {
  const LatticePoint big(6, 1);  // base (4 * 2^20)^6 blows past 64 bits
  CHECK_THROWS_AS(encode_point(big, 4, i64{1} << 20), budget_error);
}

TEST_CASE("decode_point inverts encode and flags junk") {
  CHECK(decode_point(73, 8, 3, 2) == LatticePoint{1, 1, 1});
  CHECK(!decode_point(0, 8, 3, 2).has_value());
  CHECK(decode_point(74, 8, 3, 2) == LatticePoint{2, 1, 1});
  CHECK(!decode_point(74, 8, 3, 1).has_value());  // digit 2 exceeds t=1
  CHECK(!decode_point(73 + 512, 8, 3, 2).has_value());  // an extra digit remains

  Rng rng(12);
  for (int iter = 0; iter < 1000; ++iter) {
    const i64 t = 2 + static_cast<i64>(rng.below(5));
    const i64 d = 2 + static_cast<i64>(rng.below(3));
    const i64 a = 4 + 2 * static_cast<i64>(rng.below(4));
    LatticePoint x(static_cast<std::size_t>(d));
    for (auto& c : x) c = 1 + static_cast<i64>(rng.below(static_cast<u64>(t)));
    const auto enc = encode_point(x, a, t);
    CHECK(decode_point(enc.value, enc.base, d, t) == x);
  }
}

TEST_CASE("encode is injective and embeds reversed-lex order") {
  const i64 t = 4, d = 3, a = 4;
  std::vector<std::pair<i64, LatticePoint>> all;
  LatticePoint x(static_cast<std::size_t>(d), 1);
  for (;;) {
    all.emplace_back(encode_point(x, a, t).value, x);
    i64 i = d - 1;
    while (i >= 0 && x[static_cast<std::size_t>(i)] == t) {
      x[static_cast<std::size_t>(i)] = 1;
      --i;
    }
    if (i < 0) break;
    ++x[static_cast<std::size_t>(i)];
  }
  std::sort(all.begin(), all.end());
  for (std::size_t i = 1; i < all.size(); ++i) {
    CHECK(all[i - 1].first < all[i].first);  // injective
    // encoded order == lexicographic order of reversed digit strings
    LatticePoint ra(all[i - 1].second.rbegin(), all[i - 1].second.rend());
    LatticePoint rb(all[i].second.rbegin(), all[i].second.rend());
    CHECK(ra < rb);
  }
}

TEST_CASE("check_no_carry frozen 3-AP examples") {
  const auto ap = InvariantEquation::parse({1, 1, -2});
  CHECK(check_no_carry(ap, {{1, 1}, {3, 3}, {2, 2}}, 3));
  CHECK(check_no_carry(ap, {{1, 1}, {1, 3}, {1, 2}}, 3));
  CHECK(!check_no_carry(ap, {{1, 1}, {2, 2}, {2, 1}}, 3));
}

namespace {
// independent coordinatewise evaluation for the lemma cross-check
bool coordinatewise_zero(const InvariantEquation& eq,
                         const std::vector<LatticePoint>& pts) {
  const std::size_t d = pts.front().size();
  for (std::size_t c = 0; c < d; ++c) {
    i64 acc = 0;
    for (int j = 0; j < eq.k(); ++j)
      acc += eq.coeffs()[static_cast<std::size_t>(j)] * pts[static_cast<std::size_t>(j)][c];
    if (acc != 0) return false;
  }
  return true;
}
}  // namespace

TEST_CASE("no-carry lemma holds exhaustively for t=2, d=2, k=3") {
  // all invariant 3-variable equations with coefficients in [-4,4]
  std::vector<InvariantEquation> eqs;
  for (i64 a1 = -4; a1 <= 4; ++a1)
    for (i64 a2 = -4; a2 <= 4; ++a2) {
      const i64 a3 = -(a1 + a2);
      if (a1 == 0 || a2 == 0 || a3 == 0 || std::abs(a3) > 4) continue;
      eqs.push_back(InvariantEquation::parse({a1, a2, a3}));
    }
  REQUIRE(!eqs.empty());

  std::vector<LatticePoint> box;
  for (i64 x = 1; x <= 2; ++x)
    for (i64 y = 1; y <= 2; ++y) box.push_back({x, y});

  for (const auto& eq : eqs)
    for (const auto& p1 : box)
      for (const auto& p2 : box)
        for (const auto& p3 : box) {
          const std::vector<LatticePoint> pts{p1, p2, p3};
          CHECK(check_no_carry(eq, pts, 2) == coordinatewise_zero(eq, pts));
        }
}

TEST_CASE("no-carry lemma holds on random 4-variable instances") {
  Rng rng(808);
  i64 zero_side = 0;
  for (int iter = 0; iter < 10000; ++iter) {
    const auto eq = oracles::random_equation(rng, 4);
    const i64 t = 2 + static_cast<i64>(rng.below(4));
    const i64 d = 2 + static_cast<i64>(rng.below(3));
    std::vector<LatticePoint> pts(4, LatticePoint(static_cast<std::size_t>(d)));
    for (auto& pt : pts)
      for (auto& c : pt) c = 1 + static_cast<i64>(rng.below(static_cast<u64>(t)));
    CHECK(check_no_carry(eq, pts, t) == coordinatewise_zero(eq, pts));
    if (coordinatewise_zero(eq, pts)) ++zero_side;
  }
  // ensure the sweep exercised both branches
  CHECK(zero_side > 0);
}

TEST_CASE("no-carry lemma sees engineered zero cases") {
  // x, x+delta, x+2*delta is a coordinatewise 3-AP solution
  const auto ap = InvariantEquation::parse({1, 1, -2});
  Rng rng(33);
  for (int iter = 0; iter < 200; ++iter) {
    const i64 t = 5;
    const i64 d = 3;
    LatticePoint x(static_cast<std::size_t>(d)), delta(static_cast<std::size_t>(d));
    for (std::size_t c = 0; c < static_cast<std::size_t>(d); ++c) {
      x[c] = 1 + static_cast<i64>(rng.below(3));
      delta[c] = static_cast<i64>(rng.below(2));
    }
    LatticePoint y = x, z = x;
    for (std::size_t c = 0; c < static_cast<std::size_t>(d); ++c) {
      y[c] += 2 * delta[c];
      z[c] += delta[c];
    }
    CHECK(check_no_carry(ap, {x, y, z}, t));
  }
}
