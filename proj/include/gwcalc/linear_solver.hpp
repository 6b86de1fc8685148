#pragma once

// Incremental sparse Gauss-Jordan elimination over the rationals.

#include <gwcalc/rational.hpp>

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace gwcalc {

class InconsistentError : public Error {
 public:
  using Error::Error;
};

class UnderdeterminedError : public Error {
 public:
  UnderdeterminedError(const std::string& what, std::vector<std::string> unresolved)
      : Error(what), unresolved_(std::move(unresolved)) {}
  const std::vector<std::string>& unresolved() const { return unresolved_; }

 private:
  std::vector<std::string> unresolved_;
};

/// constant + sum coeff * x_key.
template <class Key>
struct LinearForm {
  Rational constant = 0;
  std::map<Key, Rational> terms;

  LinearForm() = default;
  explicit LinearForm(Rational c) : constant(std::move(c)) {}
  static LinearForm variable(const Key& k, Rational c = 1) {
    LinearForm f;
    if (c != 0) f.terms.emplace(k, std::move(c));
    return f;
  }

  bool is_constant() const { return terms.empty(); }

  /// this += s * other
  void add(const LinearForm& other, const Rational& s = 1) {
    if (s == 0) return;
    constant += s * other.constant;
    for (const auto& [k, c] : other.terms) {
      auto [it, inserted] = terms.try_emplace(k, s * c);
      if (!inserted) {
        it->second += s * c;
        if (it->second == 0) terms.erase(it);
      }
    }
  }

  LinearForm& operator*=(const Rational& s) {
    if (s == 0) {
      constant = 0;
      terms.clear();
      return *this;
    }
    constant *= s;
    for (auto& [k, c] : terms) c *= s;
    return *this;
  }

  friend bool operator==(const LinearForm&, const LinearForm&) = default;
};

/// Accumulates equations form == 0 and solves them exactly.
template <class Key>
class SparseSystem {
 public:
  struct Solution {
    std::map<Key, Rational> values;
    std::vector<Key> undetermined;
  };

  /// Adds an equation. Throws InconsistentError when it reduces to c == 0, c != 0.
  void add_equation(const LinearForm<Key>& form) {
    Row row;
    row.constant = form.constant;
    for (const auto& [k, c] : form.terms)
      if (c != 0) row.coeffs.emplace(column(k), c);
    reduce(row);
    if (row.coeffs.empty()) {
      if (row.constant != 0)
        throw InconsistentError("inconsistent relation system: reduces to " + to_display_string(row.constant) +
                                " = 0");
      return;
    }
    auto top = std::prev(row.coeffs.end());
    const int pivot = top->first;
    const Rational inv = 1 / top->second;
    for (auto& [c, v] : row.coeffs) v *= inv;
    row.constant *= inv;
    pivots_.emplace(pivot, std::move(row));
  }

  /// Registers a key that must be determined even if no equation mentions it.
  void require(const Key& k) { column(k); }

  std::size_t rank() const { return pivots_.size(); }
  std::size_t unknown_count() const { return keys_.size(); }

  Solution solve() const {
    // expr[p]: value of the pivot column p as constant + sum over free columns.
    std::map<int, Row> expr;
    for (const auto& [p, row] : pivots_) {
      Row e;
      e.constant = -row.constant;
      for (const auto& [c, v] : row.coeffs) {
        if (c == p) continue;
        auto it = expr.find(c);
        if (it == expr.end()) {
          accumulate(e.coeffs, c, -v);
        } else {
          e.constant -= v * it->second.constant;
          for (const auto& [fc, fv] : it->second.coeffs) accumulate(e.coeffs, fc, -v * fv);
        }
      }
      expr.emplace(p, std::move(e));
    }
    Solution out;
    for (std::size_t c = 0; c < keys_.size(); ++c) {
      auto it = expr.find(static_cast<int>(c));
      if (it != expr.end() && it->second.coeffs.empty())
        out.values.emplace(keys_[c], it->second.constant);
      else
        out.undetermined.push_back(keys_[c]);
    }
    std::sort(out.undetermined.begin(), out.undetermined.end());
    return out;
  }

 private:
  struct Row {
    Rational constant = 0;
    std::map<int, Rational> coeffs;
  };

  static void accumulate(std::map<int, Rational>& m, int c, const Rational& v) {
    if (v == 0) return;
    auto [it, inserted] = m.try_emplace(c, v);
    if (!inserted) {
      it->second += v;
      if (it->second == 0) m.erase(it);
    }
  }

  int column(const Key& k) {
    auto [it, inserted] = ids_.try_emplace(k, static_cast<int>(keys_.size()));
    if (inserted) keys_.push_back(k);
    return it->second;
  }

  // Pivot rows have their pivot as the largest column, so eliminating from
  // the top down never reintroduces a column that was already cleared.
  void reduce(Row& row) const {
    int cursor = -1;
    bool first = true;
    while (!row.coeffs.empty()) {
      auto it = first ? row.coeffs.end() : row.coeffs.lower_bound(cursor);
      first = false;
      bool found = false;
      while (it != row.coeffs.begin()) {
        --it;
        auto piv = pivots_.find(it->first);
        if (piv == pivots_.end()) continue;
        const Rational f = it->second;
        const int col = it->first;
        row.constant -= f * piv->second.constant;
        for (const auto& [c, v] : piv->second.coeffs) accumulate(row.coeffs, c, -f * v);
        cursor = col;
        found = true;
        break;
      }
      if (!found) break;
    }
  }

  std::map<Key, int> ids_;
  std::vector<Key> keys_;
  std::map<int, Row> pivots_;
};

}  // namespace gwcalc
