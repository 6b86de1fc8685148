#include "fixtures.hpp"

#include <gwcalc/combinatorics.hpp>

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace gwcalc;

TEST(Partitions, Examples) {
  const auto p = enumerate_partitions(0, 2);
  ASSERT_EQ(p.size(), 4u);
  std::set<IndexSet> seen;
  for (const auto& x : p) {
    EXPECT_EQ(x.g1, 0);
    EXPECT_EQ(x.g2, 0);
    seen.insert(x.I);
  }
  EXPECT_EQ(seen.size(), 4u);
  EXPECT_EQ(enumerate_partitions(1, 2).size(), 8u);
  EXPECT_EQ(enumerate_partitions(0, 0).size(), 1u);
  EXPECT_THROW(enumerate_partitions(-1, 2), Error);
}

TEST(Partitions, RealExamples) {
  const auto p = enumerate_real_partitions(0, 1);
  ASSERT_EQ(p.size(), 3u);
  int in_i = 0, in_j = 0, in_k = 0;
  for (const auto& x : p) {
    in_i += x.I.size();
    in_j += x.J.size();
    in_k += x.K.size();
  }
  EXPECT_EQ(in_i + in_j + in_k, 3);
  EXPECT_EQ(in_i, 1);
  const auto q = enumerate_real_partitions(2, 0);
  ASSERT_EQ(q.size(), 2u);
  EXPECT_EQ(q[0].g_prime, 0);
  EXPECT_EQ(q[0].g0, 2);
  EXPECT_EQ(q[1].g_prime, 1);
  EXPECT_EQ(q[1].g0, 0);
  EXPECT_EQ(enumerate_real_partitions(1, 2).size(), 9u);
}

TEST(Partitions, CountsAndCompleteness) {
  for (int g = 0; g <= 4; ++g)
    for (int ell = 0; ell <= 6; ++ell) {
      const auto p = enumerate_partitions(g, ell);
      EXPECT_EQ(p.size(), static_cast<std::size_t>((g + 1) << ell));
      std::set<std::tuple<int, IndexSet>> distinct;
      for (const auto& x : p) {
        EXPECT_EQ(x.g1 + x.g2, g);
        EXPECT_EQ(order_bijection(x.I, x.J).size(), static_cast<std::size_t>(ell));
        distinct.insert({x.g1, x.I});
      }
      EXPECT_EQ(distinct.size(), p.size());
      const auto r = enumerate_real_partitions(g, ell);
      std::size_t pow3 = 1;
      for (int i = 0; i < ell; ++i) pow3 *= 3;
      EXPECT_EQ(r.size(), static_cast<std::size_t>(g / 2 + 1) * pow3);
      std::set<std::tuple<int, IndexSet, IndexSet>> rdistinct;
      for (const auto& x : r) {
        EXPECT_EQ(2 * x.g_prime + x.g0, g);
        EXPECT_EQ(x.I.size() + x.J.size() + x.K.size(), static_cast<std::size_t>(ell));
        rdistinct.insert({x.g_prime, x.I, x.J});
      }
      EXPECT_EQ(rdistinct.size(), r.size());
    }
}

TEST(Koszul, Examples) {
  EXPECT_EQ(koszul_sign_permutation({1, 2, 3}, {1, 3, 5}), 1);
  EXPECT_EQ(koszul_sign_permutation({2, 1}, {1, 1}), -1);
  EXPECT_EQ(koszul_sign_permutation({2, 1}, {1, 2}), 1);
  EXPECT_EQ(koszul_sign_permutation({2, 3, 1}, {1, 1, 2}), 1);
  EXPECT_THROW(koszul_sign_permutation({1, 2}, {1}), Error);
}

TEST(SplitSign, Examples) {
  EXPECT_EQ(split_sign({2, 3}, {1}, {2, 4, 6}), 1);
  EXPECT_EQ(split_sign({2}, {1}, {1, 1}), -1);
  EXPECT_EQ(split_sign({2, 3}, {1}, {1, 1, 1}), 1);
  EXPECT_THROW(split_sign({1, 2}, {2}, {1, 1}), Error);
}

TEST(EpsN, Examples) {
  EXPECT_EQ(eps_n({0, 0, {}, {}}, 3), 1);
  EXPECT_EQ(eps_n({1, 0, {}, {}}, 3), 0);
  EXPECT_EQ(eps_n({0, 2, {}, {}}, 5), -2);
  EXPECT_THROW(eps_n({0, 0, {}, {}}, 4), Error);
  const StablePartition p{0, 2, {1}, {2}};
  for (int mu_j : {0, 2, 4, 6}) EXPECT_EQ(eps_n_mu(p, 5, {2, 4}, mu_j) % 2, eps_n(p, 5) % 2);
  EXPECT_EQ(eps_n_mu({2, 0, {2}, {1}}, 3, {1, 1}, 1), -1 + 1 + 1);
}

TEST(RealWeight, Examples) {
  EXPECT_EQ(real_wdvv_weight({1, 2}, {}, {2, 2}), 1);
  EXPECT_EQ(real_wdvv_weight({1}, {2, 3}, {2, 2, 2}), 4);
  EXPECT_EQ(real_wdvv_weight({2}, {1}, {1, 1}), -2);
}

TEST(OrderBijection, Examples) {
  EXPECT_EQ(order_bijection({2, 5}, {3}), (std::vector<int>{2, 3, 5}));
  EXPECT_EQ(order_bijection({}, {1}), (std::vector<int>{1}));
  EXPECT_EQ(order_bijection({4}, {1, 2}), (std::vector<int>{1, 2, 4}));
  EXPECT_THROW(order_bijection({1}, {1}), Error);
}

TEST(Properties, KoszulHomomorphism) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> len(1, 9);
  for (int trial = 0; trial < 5000; ++trial) {
    const int n = len(rng);
    const auto degs = fixtures::random_degrees(rng, n);
    const auto p1 = fixtures::random_permutation(rng, n);
    const auto p2 = fixtures::random_permutation(rng, n);
    std::vector<int> comp(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) comp[static_cast<std::size_t>(i)] = p1[static_cast<std::size_t>(p2[static_cast<std::size_t>(i)] - 1)];
    ASSERT_EQ(koszul_sign_permutation(comp, degs),
              koszul_sign_permutation(p1, permute_degrees(p2, degs)) * koszul_sign_permutation(p2, degs));
  }
}

TEST(Properties, SplitSignSwap) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> len(0, 10);
  for (int trial = 0; trial < 5000; ++trial) {
    const int n = len(rng);
    const auto degs = fixtures::random_degrees(rng, n);
    const std::uint64_t mask = std::uniform_int_distribution<std::uint64_t>(0, (std::uint64_t{1} << n) - 1)(rng);
    const auto I = subset_from_mask(mask, n);
    const auto J = subset_from_mask(~mask & ((std::uint64_t{1} << n) - 1), n);
    int oi = 0, oj = 0;
    for (int i : I) oi += degs[static_cast<std::size_t>(i - 1)] % 2;
    for (int j : J) oj += degs[static_cast<std::size_t>(j - 1)] % 2;
    ASSERT_EQ(split_sign(I, J, degs) * split_sign(J, I, degs), (oi * oj) % 2 ? -1 : 1);
  }
}

TEST(Properties, EvenDegreesGivePlus) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + trial % 8;
    auto degs = fixtures::random_degrees(rng, n);
    for (auto& d : degs) d *= 2;
    const auto p = fixtures::random_permutation(rng, n);
    ASSERT_EQ(koszul_sign_permutation(p, degs), 1);
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;
    const std::uint64_t mask = static_cast<std::uint64_t>(trial) & full;
    const auto I = subset_from_mask(mask, n);
    const auto J = subset_from_mask(~mask & full, n);
    ASSERT_EQ(split_sign(I, J, degs), 1);
    ASSERT_EQ(real_wdvv_weight(I, J, degs), power_of_two(static_cast<int>(J.size())));
  }
}
