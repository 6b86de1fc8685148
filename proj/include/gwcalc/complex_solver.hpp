#pragma once

// Genus-0 complex invariants of projective spaces: filters, string/dilaton/
// divisor reductions, WDVV linear solving and the topological recursion for
// descendants.

#include <gwcalc/combinatorics.hpp>
#include <gwcalc/graded_algebra.hpp>
#include <gwcalc/invariant_store.hpp>
#include <gwcalc/linear_solver.hpp>
#include <gwcalc/parallel.hpp>
#include <gwcalc/rational.hpp>

#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

namespace gwcalc {

class MissingInvariantError : public Error {
 public:
  explicit MissingInvariantError(const InvariantKey& key)
      : Error("invariant not available (raise the degree bound): " + to_string(key)), key_(key) {}
  const InvariantKey& key() const { return key_; }

 private:
  InvariantKey key_;
};

enum class ZeroReason { effectivity, parity, grading };

inline std::string zero_reason_name(ZeroReason r) {
  switch (r) {
    case ZeroReason::effectivity: return "effectivity";
    case ZeroReason::parity: return "parity";
    case ZeroReason::grading: return "grading";
  }
  return "unknown";
}

using KeyForm = LinearForm<InvariantKey>;

inline int vdim_complex(int g, int ell, int d, const TargetSpace& t) {
  return 2 * ((1 - g) * (t.complex_dim() - 3) + ell + t.c1_pairing() * d);
}

/// Sum of 2a + |mu| over the insertions.
inline int insertion_degree(const TargetSpace& t, const InvariantKey& k) {
  int s = 0;
  for (const auto& ins : k.insertions) s += 2 * ins.a + t.degree(static_cast<std::size_t>(ins.basis));
  return s;
}

inline std::optional<ZeroReason> filter_complex(const TargetSpace& t, const InvariantKey& k) {
  if (k.degree < 0 || (k.degree == 0 && 2 * k.genus + k.length() < 3)) return ZeroReason::effectivity;
  if (insertion_degree(t, k) != vdim_complex(k.genus, k.length(), k.degree, t)) return ZeroReason::grading;
  return std::nullopt;
}

inline Rational classical_3pt(const TargetSpace& t, const CohClass& a, const CohClass& b, const CohClass& c) {
  return integrate(t, cup(t, cup(t, a, b), c));
}

/// Genus-0 degree-0 invariant: (l-3)!/prod a_k! * int prod mu_k when
/// sum a_k = l - 3, else 0.
inline Rational degree_zero_complex(const TargetSpace& t, const InvariantKey& k) {
  const int ell = k.length();
  if (k.genus != 0 || k.degree != 0 || ell < 3) return 0;
  if (k.total_psi() != ell - 3) return 0;
  CohClass prod = t.basis_class(0);
  Rational coeff = factorial(ell - 3);
  for (const auto& ins : k.insertions) {
    prod = cup(t, prod, t.basis_class(static_cast<std::size_t>(ins.basis)));
    coeff /= factorial(ins.a);
  }
  return coeff * integrate(t, prod);
}

namespace detail {

inline std::optional<std::size_t> divisor_index(const TargetSpace& t) {
  if (!t.is_projective() || t.rank() < 2) return std::nullopt;
  return 1;
}

inline void require_projective(const TargetSpace& t) {
  if (!t.is_projective()) throw Error("solvers only support projective targets; " + t.name() + " is not one");
}

inline std::vector<Insertion> to_insertions(const TargetSpace& t, const std::vector<BasisInsertion>& ins) {
  std::vector<Insertion> out;
  out.reserve(ins.size());
  for (const auto& b : ins) out.push_back({b.a, t.basis_class(static_cast<std::size_t>(b.basis))});
  return out;
}

inline void add_normalized(KeyForm& form, const TargetSpace& t, Kind kind, int genus, int degree,
                           const std::vector<Insertion>& raw, const Rational& coeff) {
  if (coeff == 0) return;
  for (const auto& term : normalize(t, kind, genus, degree, raw)) form.add(KeyForm::variable(term.key), coeff * term.coeff);
}

inline KeyForm multiply(const KeyForm& f, const KeyForm& g) {
  if (f.is_constant()) {
    KeyForm out = g;
    return out *= f.constant;
  }
  if (g.is_constant()) {
    KeyForm out = f;
    return out *= g.constant;
  }
  throw Error("relation term is not linear in the unknowns");
}

template <class Eval>
Rational evaluate_form(const KeyForm& f, Eval&& value) {
  Rational out = f.constant;
  for (const auto& [k, c] : f.terms) out += c * value(k);
  return out;
}

inline std::vector<BasisInsertion> without(const std::vector<BasisInsertion>& ins, std::size_t pos) {
  std::vector<BasisInsertion> out = ins;
  out.erase(out.begin() + static_cast<std::ptrdiff_t>(pos));
  return out;
}

}  // namespace detail

/// One step of the complex string, dilaton or divisor axiom on the first
/// removable insertion; nullopt when none applies.
inline std::optional<KeyForm> reduce_axioms(const TargetSpace& t, const InvariantKey& k) {
  const int ell = k.length();
  const bool rest_stable = k.degree != 0 || 2 * k.genus + (ell - 1) >= 3;
  if (!rest_stable || k.kind != Kind::complex) return std::nullopt;
  const auto divisor = detail::divisor_index(t);
  auto find = [&](int a, int basis) -> std::optional<std::size_t> {
    for (std::size_t p = 0; p < k.insertions.size(); ++p)
      if (k.insertions[p].a == a && k.insertions[p].basis == basis) return p;
    return std::nullopt;
  };
  KeyForm form;
  if (auto p = find(0, 0)) {
    const auto rest = detail::without(k.insertions, *p);
    for (std::size_t q = 0; q < rest.size(); ++q) {
      if (rest[q].a == 0) continue;
      auto lowered = rest;
      --lowered[q].a;
      detail::add_normalized(form, t, Kind::complex, k.genus, k.degree, detail::to_insertions(t, lowered), 1);
    }
    return form;
  }
  if (auto p = find(1, 0)) {
    const auto rest = detail::without(k.insertions, *p);
    detail::add_normalized(form, t, Kind::complex, k.genus, k.degree, detail::to_insertions(t, rest),
                           2 * k.genus - 2 + (ell - 1));
    return form;
  }
  if (divisor) {
    if (auto p = find(0, static_cast<int>(*divisor))) {
      const auto rest = detail::without(k.insertions, *p);
      const CohClass h = t.basis_class(*divisor);
      detail::add_normalized(form, t, Kind::complex, k.genus, k.degree, detail::to_insertions(t, rest), k.degree);
      for (std::size_t q = 0; q < rest.size(); ++q) {
        if (rest[q].a == 0) continue;
        auto raw = detail::to_insertions(t, rest);
        raw[q].a -= 1;
        raw[q].cls = cup(t, raw[q].cls, h);
        detail::add_normalized(form, t, Kind::complex, k.genus, k.degree, raw, 1);
      }
      return form;
    }
  }
  return std::nullopt;
}

/// Kontsevich's recursion for rational plane curves through 3d-1 points.
inline Rational kontsevich_p2(int d) {
  if (d < 1) throw Error("kontsevich_p2 needs d >= 1");
  std::vector<Rational> n(static_cast<std::size_t>(d) + 1);
  n[1] = 1;
  for (int e = 2; e <= d; ++e) {
    Rational sum = 0;
    for (int d1 = 1; d1 < e; ++d1) {
      const int d2 = e - d1;
      const Rational a = Rational(d1 * d1 * d2 * d2) * binomial(3 * e - 4, 3 * d1 - 2);
      const Rational b = Rational(d1 * d1 * d1 * d2) * binomial(3 * e - 4, 3 * d1 - 1);
      sum += n[static_cast<std::size_t>(d1)] * n[static_cast<std::size_t>(d2)] * (a - b);
    }
    n[static_cast<std::size_t>(e)] = sum;
  }
  return n[static_cast<std::size_t>(d)];
}

/// A relation instance: basis indices of the insertions, positions 1.. in order.
using RelationTuple = std::vector<int>;

namespace detail {

/// Excess |e_k| - 2 of a basis element.
inline int excess(const TargetSpace& t, int k) { return t.degree(static_cast<std::size_t>(k)) - 2; }

/// Tuples whose first slots are drawn (ordered) from head[i] and whose
/// remaining entries form a multiset over `tail`, with total excess `sum`,
/// at least `min_length` entries and at most `max_divisor` zero-excess entries.
inline std::vector<RelationTuple> relation_tuples(const TargetSpace& t, const std::vector<std::vector<int>>& head,
                                                  const std::vector<int>& tail, int sum, int min_length,
                                                  int max_divisor) {
  std::vector<RelationTuple> out;
  RelationTuple cur;
  std::function<void(std::size_t, int, int)> tail_rec;
  tail_rec = [&](std::size_t idx, int remaining, int divisors) {
    if (remaining == 0 && static_cast<int>(cur.size()) >= min_length) out.push_back(cur);
    for (std::size_t j = idx; j < tail.size(); ++j) {
      const int ex = excess(t, tail[j]);
      if (ex > remaining) continue;
      if (ex == 0 && divisors >= max_divisor) continue;
      cur.push_back(tail[j]);
      tail_rec(j, remaining - ex, divisors + (ex == 0 ? 1 : 0));
      cur.pop_back();
    }
  };
  std::function<void(std::size_t, int, int)> head_rec;
  head_rec = [&](std::size_t slot, int remaining, int divisors) {
    if (slot == head.size()) {
      tail_rec(0, remaining, divisors);
      return;
    }
    for (int k : head[slot]) {
      const int ex = excess(t, k);
      if (ex > remaining) continue;
      if (ex == 0 && divisors >= max_divisor) continue;
      cur.push_back(k);
      head_rec(slot + 1, remaining - ex, divisors + (ex == 0 ? 1 : 0));
      cur.pop_back();
    }
  };
  head_rec(0, sum, 0);
  return out;
}

/// Multisets over `allowed` (all of positive excess) with total excess `sum`.
inline std::vector<std::vector<int>> excess_multisets(const TargetSpace& t, const std::vector<int>& allowed, int sum) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(std::size_t, int)> rec = [&](std::size_t idx, int remaining) {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (std::size_t j = idx; j < allowed.size(); ++j) {
      const int ex = excess(t, allowed[j]);
      if (ex <= 0 || ex > remaining) continue;
      cur.push_back(allowed[j]);
      rec(j, remaining - ex);
      cur.pop_back();
    }
  };
  rec(0, sum);
  return out;
}

inline InvariantKey primary_key(Kind kind, int degree, std::vector<int> basis) {
  std::sort(basis.begin(), basis.end());
  InvariantKey k{kind, 0, degree, {}};
  for (int b : basis) k.insertions.push_back({0, b});
  return k;
}

/// Counts of each basis index among tuple positions outside `fixed`.
inline std::map<int, int> tail_counts(const RelationTuple& mu, std::size_t fixed) {
  std::map<int, int> counts;
  for (std::size_t p = fixed; p < mu.size(); ++p) ++counts[mu[p]];
  return counts;
}

/// Calls fn(weight, left, right) for every way of splitting the multiset
/// `counts` into two sides, with binomial weights.
template <class Fn>
void for_each_multiset_split(const std::map<int, int>& counts, Fn&& fn) {
  std::vector<std::pair<int, int>> items(counts.begin(), counts.end());
  std::vector<int> take(items.size(), 0);
  while (true) {
    Rational w = 1;
    std::vector<int> left, right;
    for (std::size_t i = 0; i < items.size(); ++i) {
      w *= binomial(items[i].second, take[i]);
      for (int c = 0; c < take[i]; ++c) left.push_back(items[i].first);
      for (int c = take[i]; c < items[i].second; ++c) right.push_back(items[i].first);
    }
    fn(w, left, right);
    std::size_t pos = 0;
    while (pos < items.size() && take[pos] == items[pos].second) take[pos++] = 0;
    if (pos == items.size()) break;
    ++take[pos];
  }
}

}  // namespace detail

/// Resolves a primary key to a linear form in the unknowns being solved.
using PrimaryResolver = std::function<KeyForm(const InvariantKey&)>;

/// WDVV relation (1,2|3,4) - (1,3|2,4) for the primary tuple mu at degree d,
/// as a linear form that must vanish.
inline KeyForm wdvv_relation(const TargetSpace& t, const RelationTuple& mu, int d, const PrimaryResolver& resolve) {
  if (mu.size() < 4) throw Error("WDVV relations need at least four insertions");
  const auto& ginv = t.pairing_inverse();
  const auto counts = detail::tail_counts(mu, 4);
  auto side = [&](int p1, int p2, int p3, int p4) {
    KeyForm total;
    detail::for_each_multiset_split(counts, [&](const Rational& w, const std::vector<int>& left,
                                                const std::vector<int>& right) {
      for (int d1 = 0; d1 <= d; ++d1) {
        const int d2 = d - d1;
        for (std::size_t a = 0; a < t.rank(); ++a)
          for (std::size_t b = 0; b < t.rank(); ++b) {
            if (ginv[a][b] == 0) continue;
            std::vector<int> lb = left;
            lb.push_back(mu[static_cast<std::size_t>(p1)]);
            lb.push_back(mu[static_cast<std::size_t>(p2)]);
            lb.push_back(static_cast<int>(a));
            const KeyForm lf = resolve(detail::primary_key(Kind::complex, d1, lb));
            if (lf.is_constant() && lf.constant == 0) continue;
            std::vector<int> rb = right;
            rb.push_back(mu[static_cast<std::size_t>(p3)]);
            rb.push_back(mu[static_cast<std::size_t>(p4)]);
            rb.push_back(static_cast<int>(b));
            const KeyForm rf = resolve(detail::primary_key(Kind::complex, d2, rb));
            if (rf.is_constant() && rf.constant == 0) continue;
            total.add(detail::multiply(lf, rf), w * ginv[a][b]);
          }
      }
    });
    return total;
  };
  KeyForm rel = side(0, 1, 2, 3);
  rel.add(side(0, 2, 1, 3), -1);
  return rel;
}

/// Primary resolver used while solving degree `current`: known values from
/// the table, degree-0 classical values, unit/divisor reductions, and
/// variables for the unknowns of degree `current`.
class ComplexLinearizer {
 public:
  ComplexLinearizer(const InvariantTable& table, int current) : table_(table), current_(current) {}

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
    if (filter_complex(t, k)) return KeyForm();
    if (k.degree == 0) return KeyForm(degree_zero_complex(t, k));
    if (auto v = table_.get(k)) return KeyForm(*v);
    for (std::size_t p = 0; p < k.insertions.size(); ++p) {
      if (k.insertions[p].basis == 0) return KeyForm();
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

struct SolveOptions {
  int threads = 0;
  /// Maximum number of degree-2 entries per relation tuple.
  int max_divisor_entries = 2;
};

/// Primary keys of degree d without unit or divisor insertions that pass the
/// grading filter: the unknowns of the WDVV system.
inline std::vector<InvariantKey> complex_unknowns(const TargetSpace& t, int d) {
  std::vector<int> allowed;
  for (std::size_t k = 2; k < t.rank(); ++k) allowed.push_back(static_cast<int>(k));
  const int sum = 2 * (t.complex_dim() - 3) + 2 * t.c1_pairing() * d;
  std::vector<InvariantKey> out;
  if (sum < 0) return out;
  for (auto& m : detail::excess_multisets(t, allowed, sum)) {
    auto k = detail::primary_key(Kind::complex, d, m);
    if (!filter_complex(t, k)) out.push_back(std::move(k));
  }
  return out;
}

/// All WDVV tuples used at degree d.
inline std::vector<RelationTuple> complex_relation_tuples(const TargetSpace& t, int d, int max_divisor) {
  std::vector<int> allowed;
  for (std::size_t k = 1; k < t.rank(); ++k) allowed.push_back(static_cast<int>(k));
  const int sum = 2 * (t.complex_dim() - 3) + 2 * t.c1_pairing() * d - 2;
  if (sum < 0) return {};
  return detail::relation_tuples(t, {allowed, allowed, allowed, allowed}, allowed, sum, 4, max_divisor);
}

inline InvariantKey complex_seed_key(const TargetSpace& t) {
  const int pt = static_cast<int>(t.point_index());
  return detail::primary_key(Kind::complex, 1, {pt, pt});
}

namespace detail {

inline std::string join_keys(const std::vector<InvariantKey>& keys) {
  std::string out;
  for (const auto& k : keys) out += "\n  " + to_string(k);
  return out;
}

}  // namespace detail

/// Extends `table` with the primary invariants of degrees up to max_degree.
/// Degrees already complete in the table are skipped.
inline void extend_primary_complex(InvariantTable& table, int max_degree, const SolveOptions& opts = {}) {
  const TargetSpace& t = table.target();
  detail::require_projective(t);
  const InvariantKey seed = complex_seed_key(t);
  if (max_degree >= 1 && !table.contains(seed)) table.put(seed, 1, Provenance::seed);
  for (int d = 1; d <= max_degree; ++d) {
    const auto unknowns = complex_unknowns(t, d);
    bool complete = true;
    for (const auto& k : unknowns) complete = complete && table.contains(k);
    if (complete) continue;
    const auto tuples = complex_relation_tuples(t, d, opts.max_divisor_entries);
    const std::size_t chunks = std::min<std::size_t>(tuples.size(), 64);
    auto forms = parallel_map<std::vector<KeyForm>>(chunks, opts.threads, [&](std::size_t c) {
      ComplexLinearizer lin(table, d);
      std::vector<KeyForm> out;
      for (std::size_t i = c; i < tuples.size(); i += chunks) out.push_back(wdvv_relation(t, tuples[i], d, std::ref(lin)));
      return out;
    });
    SparseSystem<InvariantKey> system;
    for (const auto& k : unknowns)
      if (!table.contains(k)) system.require(k);
    // Interleaved chunks; restore tuple order so elimination is deterministic.
    for (std::size_t i = 0; i < tuples.size(); ++i) system.add_equation(forms[i % chunks][i / chunks]);
    auto solution = system.solve();
    if (!solution.undetermined.empty())
      throw UnderdeterminedError("WDVV system for " + t.name() + " at degree " + std::to_string(d) +
                                     " leaves keys undetermined:" + detail::join_keys(solution.undetermined),
                                 [&] {
                                   std::vector<std::string> s;
                                   for (const auto& k : solution.undetermined) s.push_back(to_string(k));
                                   return s;
                                 }());
    for (const auto& [k, v] : solution.values) table.put(k, v, Provenance::wdvv);
  }
}

inline InvariantTable solve_primary_complex(const TargetSpace& t, int max_degree, const SolveOptions& opts = {}) {
  InvariantTable table(t);
  extend_primary_complex(table, max_degree, opts);
  return table;
}

enum class DescendantMethod { axioms_first, trr_first };

/// Evaluates arbitrary genus-0 complex keys from a table of solved primaries.
/// Thread-safe; results are memoized.
class ComplexInvariants {
 public:
  explicit ComplexInvariants(const InvariantTable& primaries, DescendantMethod method = DescendantMethod::axioms_first)
      : table_(primaries), method_(method) {}

  const TargetSpace& target() const { return table_.target(); }
  const InvariantTable& table() const { return table_; }

  Rational value(const InvariantKey& k) const {
    if (k.kind != Kind::complex) throw Error("complex evaluator given a real key");
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

  /// Sum over the multilinear expansion of general insertions.
  Rational value(int degree, const std::vector<Insertion>& raw) const {
    Rational out = 0;
    for (const auto& term : normalize(target(), Kind::complex, 0, degree, raw)) out += term.coeff * value(term.key);
    return out;
  }

  Rational evaluate(const KeyForm& f) const {
    return detail::evaluate_form(f, [&](const InvariantKey& k) { return value(k); });
  }

  /// The integrated topological recursion: key = returned form, where the
  /// splitting products are already evaluated into the constant.
  /// Needs degree >= 1, at least two insertions and a descendant. The
  /// partner slot defaults to the first point class, else the first slot.
  KeyForm trr_reduce(const InvariantKey& k, std::optional<std::size_t> partner = std::nullopt) const {
    const TargetSpace& t = target();
    const int d = k.degree;
    const std::size_t ell = k.insertions.size();
    if (k.genus != 0 || d < 1 || ell < 2) throw Error("TRR needs genus 0, degree >= 1 and two insertions");
    std::size_t i = ell;
    for (std::size_t p = 0; p < ell; ++p)
      if (k.insertions[p].a > 0) {
        i = p;
        break;
      }
    if (i == ell) throw Error("TRR needs a descendant insertion");
    const int pt = static_cast<int>(t.point_index());
    std::size_t j = ell;
    for (std::size_t p = 0; p < ell; ++p)
      if (p != i && k.insertions[p].basis == pt) {
        j = p;
        break;
      }
    if (j == ell) j = (i == 0) ? 1 : 0;
    if (partner) {
      if (*partner >= ell || *partner == i) throw Error("invalid TRR partner slot");
      j = *partner;
    }
    const CohClass h = t.basis_class(1);
    auto raw = detail::to_insertions(t, k.insertions);
    KeyForm form;
    {
      auto r = raw;
      r[i].a -= 1;
      r[j].cls = cup(t, r[j].cls, h);
      detail::add_normalized(form, t, Kind::complex, 0, d, r, 1);
    }
    {
      auto r = raw;
      r[i].a -= 1;
      r[i].cls = cup(t, r[i].cls, h);
      detail::add_normalized(form, t, Kind::complex, 0, d, r, -1);
    }
    std::vector<std::size_t> others;
    for (std::size_t p = 0; p < ell; ++p)
      if (p != i && p != j) others.push_back(p);
    const auto& ginv = t.pairing_inverse();
    Rational split = 0;
    for (int d1 = 0; d1 < d; ++d1) {
      const int d2 = d - d1;
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << others.size()); ++mask) {
        std::vector<BasisInsertion> left{{k.insertions[i].a - 1, k.insertions[i].basis}};
        std::vector<BasisInsertion> right{k.insertions[j]};
        for (std::size_t q = 0; q < others.size(); ++q)
          ((mask >> q) & 1 ? left : right).push_back(k.insertions[others[q]]);
        for (std::size_t a = 0; a < t.rank(); ++a)
          for (std::size_t b = 0; b < t.rank(); ++b) {
            if (ginv[a][b] == 0) continue;
            auto l = left;
            l.push_back({0, static_cast<int>(a)});
            const Rational lv = value_of(d1, l);
            if (lv == 0) continue;
            auto r = right;
            r.push_back({0, static_cast<int>(b)});
            split += d2 * ginv[a][b] * lv * value_of(d2, r);
          }
      }
    }
    form.constant += split;
    return form *= Rational(1, d);
  }

 private:
  Rational value_of(int degree, std::vector<BasisInsertion> ins) const {
    Rational out = 0;
    for (const auto& term : normalize(target(), Kind::complex, 0, degree, ins)) out += term.coeff * value(term.key);
    return out;
  }

  Rational compute(const InvariantKey& k) const {
    const TargetSpace& t = target();
    if (k.genus != 0) throw Error("only genus-0 invariants are supported");
    if (filter_complex(t, k)) return 0;
    if (k.degree == 0) return degree_zero_complex(t, k);
    if (auto v = table_.get(k)) return *v;
    const bool primary = k.is_primary();
    if (primary || method_ == DescendantMethod::axioms_first)
      if (auto f = reduce_axioms(t, k)) return evaluate(*f);
    if (primary) throw MissingInvariantError(k);
    if (k.length() >= 2) return evaluate(trr_reduce(k));
    // One insertion: divisor axiom read backwards, then TRR on the two-point key.
    const BasisInsertion only = k.insertions[0];
    InvariantKey with_h{Kind::complex, 0, k.degree, {only, {0, 1}}};
    std::sort(with_h.insertions.begin(), with_h.insertions.end());
    const Rational two_point = evaluate(trr_reduce(with_h));
    const Rational correction =
        value(k.degree, {Insertion{only.a - 1, cup(t, t.basis_class(static_cast<std::size_t>(only.basis)), t.basis_class(1))}});
    return (two_point - correction) / k.degree;
  }

  const InvariantTable& table_;
  DescendantMethod method_;
  mutable std::shared_mutex mutex_;
  mutable std::map<InvariantKey, Rational> memo_;
};

}  // namespace gwcalc
