#pragma once

// Self-consistency suites over solved tables: grading, relation residuals,
// and axiom-versus-recursion cross checks on descendant keys.

#include <gwcalc/real_solver.hpp>

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gwcalc {

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::size_t checked = 0;
  std::string counterexample;

  void fail(const std::string& what) {
    if (passed) counterexample = what;
    passed = false;
  }
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"grading", "wdvv",    "rwdvv",     "string",
                                              "dilaton", "divisor", "trr-cross", "rtrr-cross"};
  return names;
}

/// Canonical genus-0 keys of the given kind and degree passing the filters,
/// with descendant powers <= max_a and between 1 and max_len insertions.
inline std::vector<InvariantKey> enumerate_keys(const TargetSpace& t, Kind kind, int d, int max_a, int max_len) {
  std::vector<BasisInsertion> items;
  for (int a = 0; a <= max_a; ++a)
    for (std::size_t b = 0; b < t.rank(); ++b) {
      if (kind == Kind::real && real_parity_vanishes(t, a, static_cast<int>(b))) continue;
      items.push_back({a, static_cast<int>(b)});
    }
  std::vector<InvariantKey> out;
  InvariantKey cur{kind, 0, d, {}};
  std::function<void(std::size_t)> rec = [&](std::size_t idx) {
    if (!cur.insertions.empty()) {
      const bool zero = kind == Kind::complex ? filter_complex(t, cur).has_value() : filter_real(t, cur).has_value();
      if (!zero) out.push_back(cur);
    }
    if (cur.length() == max_len) return;
    for (std::size_t j = idx; j < items.size(); ++j) {
      cur.insertions.push_back(items[j]);
      rec(j);
      cur.insertions.pop_back();
    }
  };
  rec(0);
  return out;
}

struct VerifyOptions {
  int max_degree = 2;
  int max_descendant = 2;
  int max_length = 5;
  int threads = 0;
  int max_divisor_entries = 2;
};

namespace detail {

inline bool has_insertion(const InvariantKey& k, int a, int basis) {
  for (const auto& ins : k.insertions)
    if (ins.a == a && ins.basis == basis) return true;
  return false;
}

/// Resolver that only accepts fully known values.
class KnownResolver {
 public:
  explicit KnownResolver(const InvariantTable& table, Kind kind) : lin_(table, -1), rlin_(table, -1), kind_(kind) {}
  KeyForm operator()(const InvariantKey& k) { return kind_ == Kind::complex ? lin_(k) : rlin_(k); }

 private:
  ComplexLinearizer lin_;
  RealLinearizer rlin_;
  Kind kind_;
};

/// Stored top-degree keys a relation instance reads, for failure reports.
/// Degree-d entries are hidden so they surface as unknowns of the relation.
template <class Build>
std::string involved_keys(const InvariantTable& table, Kind kind, int d, Build&& build) {
  InvariantTable hidden(table.target(), table.seed_sign());
  for (const auto& [k, e] : table.entries())
    if (k.kind != kind || k.degree != d) hidden.put(k, e.value, e.provenance);
  std::vector<InvariantKey> seen;
  try {
    KeyForm form;
    if (kind == Kind::complex) {
      ComplexLinearizer lin(hidden, d);
      form = build(PrimaryResolver(std::ref(lin)));
    } else {
      RealLinearizer lin(hidden, d);
      form = build(PrimaryResolver(std::ref(lin)));
    }
    for (const auto& [k, c] : form.terms)
      if (table.contains(k)) seen.push_back(k);
  } catch (const std::exception&) {
  }
  std::string out;
  for (const auto& k : seen) out += (out.empty() ? "" : "; ") + to_string(k);
  return out;
}

}  // namespace detail

/// Largest degree up to which every complex WDVV unknown is in the table.
inline int complex_degree_available(const InvariantTable& table) {
  const auto& t = table.target();
  if (!t.is_projective()) return 0;
  int d = 0;
  while (d < 64) {
    for (const auto& k : complex_unknowns(t, d + 1))
      if (!table.contains(k)) return d;
    ++d;
  }
  return d;
}

inline SuiteResult verify_grading(const InvariantTable& table) {
  SuiteResult r{"grading"};
  const auto& t = table.target();
  for (const auto& [k, e] : table.entries()) {
    ++r.checked;
    if (e.value == 0) continue;
    const auto reason = k.kind == Kind::complex ? filter_complex(t, k) : filter_real(t, k);
    if (reason) r.fail(to_string(k) + " is stored as " + to_display_string(e.value) + " but vanishes by " +
                       zero_reason_name(*reason));
  }
  return r;
}

inline SuiteResult verify_wdvv(const InvariantTable& table, const VerifyOptions& opts) {
  SuiteResult r{"wdvv"};
  const auto& t = table.target();
  for (int d = 0; d <= opts.max_degree; ++d) {
    const auto tuples = complex_relation_tuples(t, d, opts.max_divisor_entries);
    auto residuals = parallel_map<std::optional<std::string>>(tuples.size(), opts.threads, [&](std::size_t i) {
      detail::KnownResolver known(table, Kind::complex);
      try {
        const KeyForm rel = wdvv_relation(t, tuples[i], d, std::ref(known));
        if (!rel.is_constant() || rel.constant != 0) {
          std::string mu;
          for (int b : tuples[i]) mu += " e" + std::to_string(b);
          const std::string keys = detail::involved_keys(table, Kind::complex, d, [&](const PrimaryResolver& r) {
            return wdvv_relation(t, tuples[i], d, r);
          });
          return std::optional<std::string>("WDVV residual " + to_display_string(rel.constant) + " at d=" +
                                            std::to_string(d) + " for (" + mu + " ) involving " + keys);
        }
      } catch (const MissingInvariantError& e) {
        return std::optional<std::string>(e.what());
      }
      return std::optional<std::string>();
    });
    for (const auto& res : residuals) {
      ++r.checked;
      if (res) r.fail(*res);
    }
  }
  return r;
}

inline SuiteResult verify_rwdvv(const InvariantTable& table, const VerifyOptions& opts) {
  SuiteResult r{"rwdvv"};
  const auto& t = table.target();
  detail::require_real_target(t);
  ComplexInvariants complex(table);
  for (int d = 0; d <= opts.max_degree; ++d) {
    const auto tuples = real_relation_tuples(t, d, opts.max_divisor_entries);
    auto residuals = parallel_map<std::optional<std::string>>(tuples.size(), opts.threads, [&](std::size_t i) {
      detail::KnownResolver known(table, Kind::real);
      try {
        const KeyForm rel = rwdvv_relation(t, tuples[i], d, std::ref(known), complex);
        if (!rel.is_constant() || rel.constant != 0) {
          std::string mu;
          for (int b : tuples[i]) mu += " e" + std::to_string(b);
          const std::string keys = detail::involved_keys(table, Kind::real, d, [&](const PrimaryResolver& r) {
            return rwdvv_relation(t, tuples[i], d, r, complex);
          });
          return std::optional<std::string>("real WDVV residual " + to_display_string(rel.constant) + " at d=" +
                                            std::to_string(d) + " for (" + mu + " ) involving " + keys);
        }
      } catch (const MissingInvariantError& e) {
        return std::optional<std::string>(e.what());
      }
      return std::optional<std::string>();
    });
    for (const auto& res : residuals) {
      ++r.checked;
      if (res) r.fail(*res);
    }
  }
  return r;
}

/// Compares the recursion-only value of each admissible key carrying the
/// removable insertion (a, basis) with the axiom reduction of that key.
inline SuiteResult verify_axiom(const std::string& name, const InvariantTable& table, int a, int basis,
                                const VerifyOptions& opts, bool include_real) {
  SuiteResult r{name};
  const auto& t = table.target();
  ComplexInvariants complex(table, DescendantMethod::trr_first);
  std::optional<RealInvariants> real;
  if (include_real) real.emplace(table, complex, DescendantMethod::trr_first);
  std::vector<InvariantKey> keys;
  const int complex_max = std::min(opts.max_degree, complex_degree_available(table));
  for (int d = 1; d <= opts.max_degree; ++d) {
    if (d <= complex_max)
      for (auto& k : enumerate_keys(t, Kind::complex, d, opts.max_descendant, opts.max_length))
        if (detail::has_insertion(k, a, basis)) keys.push_back(std::move(k));
    if (include_real)
      for (auto& k : enumerate_keys(t, Kind::real, d, opts.max_descendant, opts.max_length))
        if (detail::has_insertion(k, a, basis)) keys.push_back(std::move(k));
  }
  auto results = parallel_map<std::optional<std::string>>(keys.size(), opts.threads, [&](std::size_t i) {
    const auto& k = keys[i];
    try {
      const bool is_complex = k.kind == Kind::complex;
      const auto f = is_complex ? reduce_axioms(t, k) : reduce_real_axioms(t, k);
      if (!f) return std::optional<std::string>();
      const Rational direct = is_complex ? complex.value(k) : real->value(k);
      const Rational reduced = is_complex ? complex.evaluate(*f) : real->evaluate(*f);
      if (direct != reduced)
        return std::optional<std::string>(to_string(k) + ": recursion gives " + to_display_string(direct) +
                                          ", axiom gives " + to_display_string(reduced));
    } catch (const MissingInvariantError& e) {
      return std::optional<std::string>(e.what());
    }
    return std::optional<std::string>();
  });
  for (const auto& res : results) {
    ++r.checked;
    if (res) r.fail(*res);
  }
  return r;
}

/// Every admissible descendant key: the recursion-first evaluator agrees with
/// the axiom-first one, and (for complex keys) every valid partner choice in
/// the recursion gives the same value.
inline SuiteResult verify_recursion_cross(const std::string& name, const InvariantTable& table, Kind kind,
                                          const VerifyOptions& opts) {
  SuiteResult r{name};
  const auto& t = table.target();
  ComplexInvariants complex_trr(table, DescendantMethod::trr_first);
  ComplexInvariants complex_ax(table, DescendantMethod::axioms_first);
  std::optional<RealInvariants> real_trr, real_ax;
  if (kind == Kind::real) {
    real_trr.emplace(table, complex_trr, DescendantMethod::trr_first);
    real_ax.emplace(table, complex_ax, DescendantMethod::axioms_first);
  }
  std::vector<InvariantKey> keys;
  const int max_degree = kind == Kind::complex ? std::min(opts.max_degree, complex_degree_available(table)) : opts.max_degree;
  for (int d = 1; d <= max_degree; ++d)
    for (auto& k : enumerate_keys(t, kind, d, opts.max_descendant, opts.max_length))
      if (!k.is_primary()) keys.push_back(std::move(k));
  auto results = parallel_map<std::optional<std::string>>(keys.size(), opts.threads, [&](std::size_t i) {
    const auto& k = keys[i];
    try {
      const Rational a = kind == Kind::complex ? complex_trr.value(k) : real_trr->value(k);
      const Rational b = kind == Kind::complex ? complex_ax.value(k) : real_ax->value(k);
      if (a != b)
        return std::optional<std::string>(to_string(k) + ": recursion gives " + to_display_string(a) +
                                          ", axioms give " + to_display_string(b));
      if (kind == Kind::complex && k.length() >= 2) {
        for (std::size_t j = 0; j < k.insertions.size(); ++j) {
          std::size_t i0 = 0;
          while (k.insertions[i0].a == 0) ++i0;
          if (j == i0) continue;
          const Rational c = complex_trr.evaluate(complex_trr.trr_reduce(k, j));
          if (c != a)
            return std::optional<std::string>(to_string(k) + ": partner choice " + std::to_string(j + 1) + " gives " +
                                              to_display_string(c) + ", expected " + to_display_string(a));
        }
      }
    } catch (const MissingInvariantError& e) {
      return std::optional<std::string>(e.what());
    }
    return std::optional<std::string>();
  });
  for (const auto& res : results) {
    ++r.checked;
    if (res) r.fail(*res);
  }
  return r;
}

inline SuiteResult run_suite(const std::string& name, const InvariantTable& table, const VerifyOptions& opts) {
  const auto& t = table.target();
  const bool real = t.has_involution() && t.involution_is_diagonal() && t.is_projective() && t.complex_dim() % 2 == 1;
  if (name == "grading") return verify_grading(table);
  if (name == "wdvv") return verify_wdvv(table, opts);
  if (name == "rwdvv") return verify_rwdvv(table, opts);
  if (name == "string") return verify_axiom("string", table, 0, 0, opts, real);
  if (name == "dilaton") return verify_axiom("dilaton", table, 1, 0, opts, real);
  if (name == "divisor") return verify_axiom("divisor", table, 0, 1, opts, real);
  if (name == "trr-cross") return verify_recursion_cross("trr-cross", table, Kind::complex, opts);
  if (name == "rtrr-cross") {
    detail::require_real_target(t);
    return verify_recursion_cross("rtrr-cross", table, Kind::real, opts);
  }
  throw Error("unknown suite: " + name);
}

}  // namespace gwcalc
