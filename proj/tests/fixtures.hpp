#pragma once

#include <gwcalc/graded_algebra.hpp>

#include <bit>
#include <cstdint>
#include <random>
#include <vector>

namespace fixtures {

using namespace gwcalc;

/// Exterior algebra on k degree-1 generators (k even): the cohomology ring of
/// a k-torus, with every odd-degree sign in play.
inline TargetSpace exterior_ring(int k) {
  std::vector<std::uint32_t> subsets;
  for (std::uint32_t s = 0; s < (1u << k); ++s) subsets.push_back(s);
  std::stable_sort(subsets.begin(), subsets.end(),
                   [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });
  const std::size_t n = subsets.size();
  std::vector<std::size_t> index(n);
  for (std::size_t i = 0; i < n; ++i) index[subsets[i]] = i;
  TargetData d;
  d.name = "T" + std::to_string(k);
  d.complex_dim = k / 2;
  d.mult_table.assign(n, RationalMatrix(n, std::vector<Rational>(n)));
  d.pairing.assign(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) d.basis_degrees.push_back(std::popcount(subsets[i]));
  const std::uint32_t top = (1u << k) - 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::uint32_t s = subsets[i], t = subsets[j];
      if (s & t) continue;
      int inversions = 0;
      for (int a = 0; a < k; ++a)
        if ((s >> a) & 1)
          for (int b = 0; b < a; ++b)
            if ((t >> b) & 1) ++inversions;
      const int sign = inversions % 2 ? -1 : 1;
      d.mult_table[i][j][index[s | t]] = sign;
      if ((s | t) == top) d.pairing[i][j] = sign;
    }
  return TargetSpace(std::move(d));
}

/// Two degree-0 classes with pairing [[0,1],[1,1]]; e_2 * e_2 = e_2.
inline TargetSpace two_point_ring() {
  TargetData d;
  d.name = "pair";
  d.complex_dim = 0;
  d.basis_degrees = {0, 0};
  d.mult_table.assign(2, RationalMatrix(2, std::vector<Rational>(2)));
  d.mult_table[0][0][0] = 1;
  d.mult_table[0][1][1] = 1;
  d.mult_table[1][0][1] = 1;
  d.mult_table[1][1][1] = 1;
  d.pairing = {{0, 1}, {1, 1}};
  return TargetSpace(std::move(d));
}

inline std::vector<TargetSpace> builtin_targets() {
  std::vector<TargetSpace> out;
  for (int n = 1; n <= 7; ++n) out.push_back(projective_space(n));
  for (int m = 1; m <= 4; ++m) {
    out.push_back(make_projective(m, Involution::tau));
    out.push_back(make_projective(m, Involution::eta));
  }
  return out;
}

inline std::vector<int> random_permutation(std::mt19937& rng, int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i + 1;
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

inline std::vector<int> random_degrees(std::mt19937& rng, int n, int max_degree = 4) {
  std::uniform_int_distribution<int> deg(0, max_degree);
  std::vector<int> out(static_cast<std::size_t>(n));
  for (auto& d : out) d = deg(rng);
  return out;
}

}  // namespace fixtures
