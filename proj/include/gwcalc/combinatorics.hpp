#pragma once

// Splittings of marked points and genus, and the Koszul-type sign exponents
// that come with them. Index sets are sorted lists of 1-based indices.

#include <gwcalc/rational.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace gwcalc {

using IndexSet = std::vector<int>;

struct StablePartition {
  int g1 = 0;
  int g2 = 0;
  IndexSet I;
  IndexSet J;
  friend bool operator==(const StablePartition&, const StablePartition&) = default;
};

struct RealPartition {
  int g_prime = 0;
  int g0 = 0;
  IndexSet I;
  IndexSet J;
  IndexSet K;
  friend bool operator==(const RealPartition&, const RealPartition&) = default;
};

namespace detail {

inline void require_nonnegative(int g, int ell) {
  if (g < 0 || ell < 0) throw Error("genus and number of marked points must be nonnegative");
  if (ell > 62) throw Error("at most 62 marked points are supported");
}

inline bool odd(int d) { return d % 2 != 0; }

inline int deg_at(const std::vector<int>& degs, int index) {
  if (index < 1 || static_cast<std::size_t>(index) > degs.size()) throw Error("index out of range for degree list");
  return degs[static_cast<std::size_t>(index - 1)];
}

inline void require_disjoint(const IndexSet& I, const IndexSet& J) {
  for (int i : I)
    if (std::find(J.begin(), J.end(), i) != J.end()) throw Error("index sets overlap");
}

}  // namespace detail

/// Subset of [ell] selected by the bits of mask.
inline IndexSet subset_from_mask(std::uint64_t mask, int ell) {
  IndexSet out;
  for (int i = 0; i < ell; ++i)
    if (mask & (std::uint64_t{1} << i)) out.push_back(i + 1);
  return out;
}

inline std::vector<StablePartition> enumerate_partitions(int g, int ell) {
  detail::require_nonnegative(g, ell);
  std::vector<StablePartition> out;
  const std::uint64_t full = std::uint64_t{1} << ell;
  for (int g1 = 0; g1 <= g; ++g1)
    for (std::uint64_t mask = 0; mask < full; ++mask)
      out.push_back({g1, g - g1, subset_from_mask(mask, ell), subset_from_mask(~mask & (full - 1), ell)});
  return out;
}

inline std::vector<RealPartition> enumerate_real_partitions(int g, int ell) {
  detail::require_nonnegative(g, ell);
  std::vector<RealPartition> out;
  std::vector<int> place(static_cast<std::size_t>(ell), 0);
  for (int gp = 0; 2 * gp <= g; ++gp) {
    std::fill(place.begin(), place.end(), 0);
    while (true) {
      RealPartition p{gp, g - 2 * gp, {}, {}, {}};
      for (int i = 0; i < ell; ++i) {
        auto& target = place[static_cast<std::size_t>(i)] == 0 ? p.I : place[static_cast<std::size_t>(i)] == 1 ? p.J : p.K;
        target.push_back(i + 1);
      }
      out.push_back(std::move(p));
      int pos = 0;
      while (pos < ell && place[static_cast<std::size_t>(pos)] == 2) place[static_cast<std::size_t>(pos++)] = 0;
      if (pos == ell) break;
      ++place[static_cast<std::size_t>(pos)];
    }
  }
  return out;
}

/// epsilon(perm, mu): inversions i < j with perm(i) > perm(j) and both
/// |mu_i|, |mu_j| odd. perm holds the 1-based images of 1..ell.
inline int koszul_exponent(const std::vector<int>& perm, const std::vector<int>& degs) {
  if (perm.size() != degs.size()) throw Error("permutation and degree list differ in length");
  int count = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (!detail::odd(degs[i])) continue;
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (detail::odd(degs[j]) && perm[i] > perm[j]) ++count;
  }
  return count;
}

inline int koszul_sign_permutation(const std::vector<int>& perm, const std::vector<int>& degs) {
  return koszul_exponent(perm, degs) % 2 == 0 ? 1 : -1;
}

/// Degrees after moving slot i to slot perm(i).
inline std::vector<int> permute_degrees(const std::vector<int>& perm, const std::vector<int>& degs) {
  std::vector<int> out(degs.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out.at(static_cast<std::size_t>(perm[i] - 1)) = degs.at(i);
  return out;
}

/// epsilon((I,J), mu) = sum of |mu_i||mu_j| over i in I, j in J, i > j.
inline int split_exponent(const IndexSet& I, const IndexSet& J, const std::vector<int>& degs) {
  detail::require_disjoint(I, J);
  int total = 0;
  for (int i : I)
    for (int j : J)
      if (i > j) total += detail::deg_at(degs, i) * detail::deg_at(degs, j);
  return total;
}

inline int split_sign(const IndexSet& I, const IndexSet& J, const std::vector<int>& degs) {
  return split_exponent(I, J, degs) % 2 == 0 ? 1 : -1;
}

/// (n-1)/2 (g1-1)(g2-1), for odd n.
inline int eps_n(const StablePartition& p, int n) {
  if (n % 2 == 0) throw Error("eps_n needs odd n");
  return (n - 1) / 2 * (p.g1 - 1) * (p.g2 - 1);
}

/// eps_n(P) + epsilon(P, mu) + (g1-1)|mu_J|.
inline int eps_n_mu(const StablePartition& p, int n, const std::vector<int>& degs, int mu_J_degree) {
  return eps_n(p, n) + split_exponent(p.I, p.J, degs) + (p.g1 - 1) * mu_J_degree;
}

inline Rational real_wdvv_weight(const IndexSet& I, const IndexSet& J, const std::vector<int>& degs) {
  return split_sign(I, J, degs) * power_of_two(static_cast<int>(J.size()));
}

/// iota_{I,J}: entry k-1 is the k-th smallest element of I and J combined.
inline std::vector<int> order_bijection(const IndexSet& I, const IndexSet& J) {
  detail::require_disjoint(I, J);
  std::vector<int> out = I;
  out.insert(out.end(), J.begin(), J.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gwcalc
