#pragma once

// Genus-0 real invariants of (P^{2m-1}, tau/eta): filters, real string/
// dilaton/divisor reductions, the real WDVV system, and the real topological
// recursion for descendants.

#include <gwcalc/complex_solver.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace gwcalc {

inline int vdim_real(int g, int ell, int d, const TargetSpace& t) {
  return (1 - g) * (t.complex_dim() - 3) + 2 * ell + t.c1_pairing() * d;
}

inline std::optional<ZeroReason> filter_real(const TargetSpace& t, const InvariantKey& k) {
  if (k.degree < 0 || (k.degree == 0 && k.genus + k.length() <= 1)) return ZeroReason::effectivity;
  for (const auto& ins : k.insertions)
    if (real_parity_vanishes(t, ins.a, ins.basis)) return ZeroReason::parity;
  if (insertion_degree(t, k) != vdim_real(k.genus, k.length(), k.degree, t)) return ZeroReason::grading;
  return std::nullopt;
}

/// d' - phi_*(d').
inline int real_degree_map(int d_prime, const TargetSpace& t) { return (1 + t.degree_negation()) * d_prime; }

/// Degree-0 genus-0 real invariants vanish: the class is of codimension 0 on
/// a positive-dimensional moduli space, or the fixed locus is empty.
inline Rational real_mapping_to_point(const TargetSpace&, const InvariantKey& k) {
  if (k.degree != 0 || k.genus != 0) throw Error("real_mapping_to_point needs a genus-0 degree-0 key");
  return 0;
}

/// One step of R3/R4/R5 on the first removable insertion; nullopt when none applies.
inline std::optional<KeyForm> reduce_real_axioms(const TargetSpace& t, const InvariantKey& k) {
  if (k.kind != Kind::real) return std::nullopt;
  const int ell = k.length();
  auto find = [&](int a, int basis) -> std::optional<std::size_t> {
    for (std::size_t p = 0; p < k.insertions.size(); ++p)
      if (k.insertions[p].a == a && k.insertions[p].basis == basis) return p;
    return std::nullopt;
  };
  if (find(0, 0)) return KeyForm();
  const bool rest_stable = k.degree != 0 || k.genus + (ell - 1) >= 2;
  if (!rest_stable) return std::nullopt;
  KeyForm form;
  if (auto p = find(1, 0)) {
    const auto rest = detail::without(k.insertions, *p);
    detail::add_normalized(form, t, Kind::real, k.genus, k.degree, detail::to_insertions(t, rest),
                           2 * (k.genus - 1 + (ell - 1)));
    return form;
  }
  const auto divisor = detail::divisor_index(t);
  if (divisor && t.involution_sign(*divisor) == -1) {
    if (auto p = find(0, static_cast<int>(*divisor))) {
      const auto rest = detail::without(k.insertions, *p);
      const CohClass h = t.basis_class(*divisor);
      detail::add_normalized(form, t, Kind::real, k.genus, k.degree, detail::to_insertions(t, rest), k.degree);
      for (std::size_t q = 0; q < rest.size(); ++q) {
        if (rest[q].a == 0) continue;
        auto raw = detail::to_insertions(t, rest);
        raw[q].a -= 1;
        raw[q].cls = cup(t, raw[q].cls, h);
        detail::add_normalized(form, t, Kind::real, k.genus, k.degree, raw, 2);
      }
      return form;
    }
  }
  return std::nullopt;
}

namespace detail {

inline void require_real_target(const TargetSpace& t) {
  require_projective(t);
  if (!t.has_involution() || !t.involution_is_diagonal())
    throw Error("real invariants need a target with an involution; " + t.name() + " has none");
  if (t.complex_dim() % 2 == 0) throw Error("real invariants need odd complex dimension");
}

}  // namespace detail

/// Real WDVV relation (2 | 1,3) - (3 | 1,2) for mu_1 in H_+ and the rest in
/// H_-, at real degree d, as a linear form in the real unknowns. Complex
/// factors come from `complex`.
inline KeyForm rwdvv_relation(const TargetSpace& t, const RelationTuple& mu, int d, const PrimaryResolver& resolve_real,
                              const ComplexInvariants& complex) {
  if (mu.size() < 3) throw Error("real WDVV relations need at least three insertions");
  if (t.involution_sign(static_cast<std::size_t>(mu[0])) != 1) throw Error("first real WDVV insertion must lie in H_+");
  for (std::size_t p = 1; p < mu.size(); ++p)
    if (t.involution_sign(static_cast<std::size_t>(mu[p])) != -1)
      throw Error("real WDVV insertions after the first must lie in H_-");
  const auto& ginv = t.pairing_inverse();
  const auto counts = detail::tail_counts(mu, 3);
  auto side = [&](int real_pos, int c1, int c2) {
    KeyForm total;
    detail::for_each_multiset_split(counts, [&](const Rational& w, const std::vector<int>& left,
                                                const std::vector<int>& right) {
      // left: real side with mu_{real_pos}; right: complex side with mu_{c1}, mu_{c2}.
      const Rational weight = w * power_of_two(static_cast<int>(right.size()) + 2);
      for (int dp = 0; real_degree_map(dp, t) <= d; ++dp) {
        const int d0 = d - real_degree_map(dp, t);
        for (std::size_t a = 0; a < t.rank(); ++a)
          for (std::size_t b = 0; b < t.rank(); ++b) {
            if (ginv[a][b] == 0) continue;
            std::vector<int> cb = right;
            cb.push_back(mu[static_cast<std::size_t>(c1)]);
            cb.push_back(mu[static_cast<std::size_t>(c2)]);
            cb.push_back(static_cast<int>(b));
            const Rational cv = complex.value(detail::primary_key(Kind::complex, dp, cb));
            if (cv == 0) continue;
            std::vector<int> rb = left;
            rb.push_back(mu[static_cast<std::size_t>(real_pos)]);
            rb.push_back(static_cast<int>(a));
            const KeyForm rf = resolve_real(detail::primary_key(Kind::real, d0, rb));
            total.add(rf, weight * ginv[a][b] * cv);
          }
      }
    });
    return total;
  };
  KeyForm rel = side(1, 0, 2);
  rel.add(side(2, 0, 1), -1);
  return rel;
}

/// Real primary resolver used while solving degree `current`.
class RealLinearizer {
 public:
  RealLinearizer(const InvariantTable& table, int current) : table_(table), current_(current) {}

  KeyForm operator()(const InvariantKey& k) {
    auto it = memo_.find(k);
    if (it != memo_.end()) return it->second;
    KeyForm f = compute(k);
    memo_.emplace(k, f);
    return f;
  }

 private:
  KeyForm compute(const InvariantKey& k) {
    const TargetSpace& t = table_.target();
    if (filter_real(t, k)) return KeyForm();
    if (k.degree == 0) return KeyForm(real_mapping_to_point(t, k));
    if (auto v = table_.get(k)) return KeyForm(*v);
    for (std::size_t p = 0; p < k.insertions.size(); ++p) {
      if (k.insertions[p].basis == 1) {
        InvariantKey rest = k;
        rest.insertions.erase(rest.insertions.begin() + static_cast<std::ptrdiff_t>(p));
        KeyForm f = (*this)(rest);
        return f *= k.degree;
      }
    }
    if (k.degree == current_) return KeyForm::variable(k);
    throw MissingInvariantError(k);
  }

  const InvariantTable& table_;
  int current_;
  std::map<InvariantKey, KeyForm> memo_;
};

/// Real primary keys of degree d with insertions in H_- other than the
/// divisor class that pass the filters.
inline std::vector<InvariantKey> real_unknowns(const TargetSpace& t, int d) {
  std::vector<int> allowed;
  for (std::size_t k = 2; k < t.rank(); ++k)
    if (t.involution_sign(k) == -1) allowed.push_back(static_cast<int>(k));
  const int sum = (t.complex_dim() - 3) + t.c1_pairing() * d;
  std::vector<InvariantKey> out;
  if (sum < 0) return out;
  for (auto& m : detail::excess_multisets(t, allowed, sum)) {
    auto k = detail::primary_key(Kind::real, d, m);
    if (!filter_real(t, k)) out.push_back(std::move(k));
  }
  return out;
}

inline std::vector<RelationTuple> real_relation_tuples(const TargetSpace& t, int d, int max_divisor) {
  std::vector<int> plus, minus;
  for (std::size_t k = 1; k < t.rank(); ++k) (t.involution_sign(k) == 1 ? plus : minus).push_back(static_cast<int>(k));
  const int sum = (t.complex_dim() - 3) + t.c1_pairing() * d - 2;
  if (sum < 0) return {};
  return detail::relation_tuples(t, {plus, minus, minus}, minus, sum, 3, max_divisor);
}

inline InvariantKey real_seed_key(const TargetSpace& t) {
  return detail::primary_key(Kind::real, 1, {static_cast<int>(t.point_index())});
}

/// Largest complex degree the real system up to max_degree refers to.
inline int complex_degree_needed(const TargetSpace& t, int max_degree) {
  int dp = 0;
  while (real_degree_map(dp + 1, t) <= max_degree) ++dp;
  return dp;
}

/// Extends `table` with real primaries up to max_degree, first extending its
/// complex primaries as far as the real relations need. Without a seed the
/// system is left homogeneous and reports the undetermined keys.
inline void extend_primary_real(InvariantTable& table, int max_degree, std::optional<int> seed_sign,
                                const SolveOptions& opts = {}) {
  const TargetSpace& t = table.target();
  detail::require_real_target(t);
  extend_primary_complex(table, complex_degree_needed(t, max_degree), opts);
  const InvariantKey seed = real_seed_key(t);
  if (seed_sign && max_degree >= 1 && !table.contains(seed)) table.put(seed, *seed_sign, Provenance::seed);
  ComplexInvariants complex(table);
  for (int d = 1; d <= max_degree; ++d) {
    const auto unknowns = real_unknowns(t, d);
    bool complete = true;
    for (const auto& k : unknowns) complete = complete && table.contains(k);
    if (complete) continue;
    const auto tuples = real_relation_tuples(t, d, opts.max_divisor_entries);
    const std::size_t chunks = std::min<std::size_t>(tuples.size(), 64);
    auto forms = parallel_map<std::vector<KeyForm>>(chunks, opts.threads, [&](std::size_t c) {
      RealLinearizer lin(table, d);
      std::vector<KeyForm> out;
      for (std::size_t i = c; i < tuples.size(); i += chunks)
        out.push_back(rwdvv_relation(t, tuples[i], d, std::ref(lin), complex));
      return out;
    });
    SparseSystem<InvariantKey> system;
    for (const auto& k : unknowns)
      if (!table.contains(k)) system.require(k);
    for (std::size_t i = 0; i < tuples.size(); ++i) system.add_equation(forms[i % chunks][i / chunks]);
    auto solution = system.solve();
    if (!solution.undetermined.empty()) {
      std::vector<std::string> names;
      for (const auto& k : solution.undetermined) names.push_back(to_string(k));
      throw UnderdeterminedError("real WDVV system for " + t.name() + " at degree " + std::to_string(d) +
                                     " leaves keys undetermined:" + detail::join_keys(solution.undetermined),
                                 std::move(names));
    }
    for (const auto& [k, v] : solution.values) table.put(k, v, Provenance::rwdvv);
  }
}

inline InvariantTable solve_primary_real(const TargetSpace& t, int max_degree, std::optional<int> seed_sign = 1,
                                         const SolveOptions& opts = {}) {
  InvariantTable table(t, seed_sign.value_or(1));
  extend_primary_real(table, max_degree, seed_sign, opts);
  return table;
}

/// Evaluates arbitrary genus-0 real keys from a table holding the real and
/// complex primaries. Thread-safe; results are memoized.
class RealInvariants {
 public:
  RealInvariants(const InvariantTable& table, const ComplexInvariants& complex,
                 DescendantMethod method = DescendantMethod::axioms_first)
      : table_(table), complex_(complex), method_(method) {}

  const TargetSpace& target() const { return table_.target(); }
  const ComplexInvariants& complex() const { return complex_; }

  Rational value(const InvariantKey& k) const {
    if (k.kind != Kind::real) throw Error("real evaluator given a complex key");
    {
      std::shared_lock lock(mutex_);
      auto it = memo_.find(k);
      if (it != memo_.end()) return it->second;
    }
    const Rational v = compute(k);
    std::unique_lock lock(mutex_);
    memo_.emplace(k, v);
    return v;
  }

  Rational value(int degree, const std::vector<Insertion>& raw) const {
    Rational out = 0;
    for (const auto& term : normalize(target(), Kind::real, 0, degree, raw)) out += term.coeff * value(term.key);
    return out;
  }

  Rational evaluate(const KeyForm& f) const {
    return detail::evaluate_form(f, [&](const InvariantKey& k) { return value(k); });
  }

  /// The integrated real topological recursion on the first descendant
  /// insertion; splitting products are evaluated into the constant.
  KeyForm rtrr_reduce(const InvariantKey& k) const {
    const TargetSpace& t = target();
    const int d = k.degree;
    const std::size_t ell = k.insertions.size();
    if (k.genus != 0 || d < 1) throw Error("real TRR needs genus 0 and degree >= 1");
    std::size_t i = ell;
    for (std::size_t p = 0; p < ell; ++p)
      if (k.insertions[p].a > 0) {
        i = p;
        break;
      }
    if (i == ell) throw Error("real TRR needs a descendant insertion");
    const CohClass h = t.basis_class(1);
    KeyForm form;
    {
      auto r = detail::to_insertions(t, k.insertions);
      r[i].a -= 1;
      r[i].cls = cup(t, r[i].cls, h);
      detail::add_normalized(form, t, Kind::real, 0, d, r, -2);
    }
    std::vector<std::size_t> others;
    for (std::size_t p = 0; p < ell; ++p)
      if (p != i) others.push_back(p);
    const auto& ginv = t.pairing_inverse();
    Rational split = 0;
    for (int dp = 0; real_degree_map(dp, t) < d; ++dp) {
      const int d0 = d - real_degree_map(dp, t);
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << others.size()); ++mask) {
        std::vector<BasisInsertion> cside{{k.insertions[i].a - 1, k.insertions[i].basis}};
        std::vector<BasisInsertion> rside;
        Rational weight = d0;
        for (std::size_t q = 0; q < others.size(); ++q) {
          const auto& ins = k.insertions[others[q]];
          if ((mask >> q) & 1) {
            const int s = (ins.a % 2 == 0 ? 1 : -1) * t.involution_sign(static_cast<std::size_t>(ins.basis)) * -1;
            weight *= 1 + s;
            cside.push_back(ins);
          } else {
            rside.push_back(ins);
          }
        }
        if (weight == 0) continue;
        for (std::size_t a = 0; a < t.rank(); ++a)
          for (std::size_t b = 0; b < t.rank(); ++b) {
            if (ginv[a][b] == 0) continue;
            auto c = cside;
            c.push_back({0, static_cast<int>(a)});
            const Rational cv = complex_value(dp, c);
            if (cv == 0) continue;
            auto r = rside;
            r.push_back({0, static_cast<int>(b)});
            split += weight * ginv[a][b] * cv * real_value(d0, r);
          }
      }
    }
    form.constant += split;
    return form *= Rational(1, d);
  }

 private:
  Rational complex_value(int degree, const std::vector<BasisInsertion>& ins) const {
    Rational out = 0;
    for (const auto& term : normalize(target(), Kind::complex, 0, degree, ins)) out += term.coeff * complex_.value(term.key);
    return out;
  }

  Rational real_value(int degree, const std::vector<BasisInsertion>& ins) const {
    Rational out = 0;
    for (const auto& term : normalize(target(), Kind::real, 0, degree, ins)) out += term.coeff * value(term.key);
    return out;
  }

  Rational compute(const InvariantKey& k) const {
    const TargetSpace& t = target();
    if (k.genus != 0) throw Error("only genus-0 invariants are supported");
    if (filter_real(t, k)) return 0;
    if (k.degree == 0) return real_mapping_to_point(t, k);
    if (auto v = table_.get(k)) return *v;
    const bool primary = k.is_primary();
    if (primary || method_ == DescendantMethod::axioms_first)
      if (auto f = reduce_real_axioms(t, k)) return evaluate(*f);
    if (primary) throw MissingInvariantError(k);
    return evaluate(rtrr_reduce(k));
  }

  const InvariantTable& table_;
  const ComplexInvariants& complex_;
  DescendantMethod method_;
  mutable std::shared_mutex mutex_;
  mutable std::map<InvariantKey, Rational> memo_;
};

}  // namespace gwcalc
