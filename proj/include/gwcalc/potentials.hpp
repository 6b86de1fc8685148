#pragma once

// Truncated super-commutative power series in t_{ai}, q and lambda, the
// genus-0 generating functions built from solved tables, and the residuals
// of their differential equations.

#include <gwcalc/verify.hpp>

#include <json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gwcalc {

struct Truncation {
  int max_t_degree = 10;
  int max_q = 4;
  int max_descendant = 2;
  friend bool operator==(const Truncation&, const Truncation&) = default;
};

/// Variables t_{ai}, a <= max_descendant, i < rank; t_{ai} has the parity of |e_i|.
class VariableSpace {
 public:
  VariableSpace(std::vector<int> basis_degrees, int max_descendant)
      : degrees_(std::move(basis_degrees)), max_descendant_(max_descendant) {}
  explicit VariableSpace(const TargetSpace& t, int max_descendant) : VariableSpace(t.basis_degrees(), max_descendant) {}

  int rank() const { return static_cast<int>(degrees_.size()); }
  int max_descendant() const { return max_descendant_; }
  int count() const { return rank() * (max_descendant_ + 1); }
  int id(int a, int i) const {
    if (a < 0 || a > max_descendant_ || i < 0 || i >= rank()) throw Error("variable out of range");
    return a * rank() + i;
  }
  int descendant(int id) const { return id / rank(); }
  int basis(int id) const { return id % rank(); }
  bool odd(int id) const { return degrees_[static_cast<std::size_t>(basis(id))] % 2 != 0; }
  const std::vector<int>& degrees() const { return degrees_; }

  std::string name(int id) const { return "t" + std::to_string(descendant(id)) + "_" + std::to_string(basis(id)); }

  friend bool operator==(const VariableSpace&, const VariableSpace&) = default;

 private:
  std::vector<int> degrees_;
  int max_descendant_;
};

/// Variables in increasing id order with multiplicities, times q^q lambda^lambda.
struct Monomial {
  std::vector<std::pair<int, int>> vars;
  int q = 0;
  int lambda = 0;

  int t_degree() const {
    int s = 0;
    for (const auto& v : vars) s += v.second;
    return s;
  }
  int multiplicity(int id) const {
    for (const auto& v : vars)
      if (v.first == id) return v.second;
    return 0;
  }
  auto operator<=>(const Monomial&) const = default;
};

class GradedSeries {
 public:
  GradedSeries(std::shared_ptr<const VariableSpace> space, Truncation trunc)
      : space_(std::move(space)), trunc_(trunc) {}

  const VariableSpace& space() const { return *space_; }
  const std::shared_ptr<const VariableSpace>& space_ptr() const { return space_; }
  const Truncation& truncation() const { return trunc_; }
  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  static GradedSeries variable(std::shared_ptr<const VariableSpace> space, Truncation trunc, int a, int i) {
    GradedSeries s(space, trunc);
    s.add_term(Monomial{{{space->id(a, i), 1}}, 0, 0}, 1);
    return s;
  }

  static GradedSeries constant(std::shared_ptr<const VariableSpace> space, Truncation trunc, const Rational& c,
                               int q = 0, int lambda = 0) {
    GradedSeries s(space, trunc);
    s.add_term(Monomial{{}, q, lambda}, c);
    return s;
  }

  /// Adds c * m, dropping it when it lies beyond the truncation or squares an odd variable.
  void add_term(const Monomial& m, const Rational& c) {
    if (c == 0 || !within(m)) return;
    for (const auto& [id, mult] : m.vars)
      if (mult > 1 && space_->odd(id)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Rational coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  GradedSeries& operator+=(const GradedSeries& o) {
    check_compatible(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  GradedSeries& operator-=(const GradedSeries& o) {
    check_compatible(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  GradedSeries& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }
  friend GradedSeries operator+(GradedSeries a, const GradedSeries& b) { return a += b; }
  friend GradedSeries operator-(GradedSeries a, const GradedSeries& b) { return a -= b; }
  friend GradedSeries operator*(const Rational& s, GradedSeries a) { return a *= s; }

  friend GradedSeries operator*(const GradedSeries& a, const GradedSeries& b) {
    a.check_compatible(b);
    GradedSeries out(a.space_, a.trunc_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        if (ma.t_degree() + mb.t_degree() > a.trunc_.max_t_degree || ma.q + mb.q > a.trunc_.max_q) continue;
        int sign = 1;
        auto m = a.multiply_monomials(ma, mb, sign);
        if (m) out.add_term(*m, sign * ca * cb);
      }
    return out;
  }

  /// Left derivative: moves t_{ai} to the front with its Koszul sign, then
  /// differentiates. The result is valid to one lower t-degree.
  GradedSeries derivative(int a, int i) const {
    const int id = space_->id(a, i);
    Truncation t = trunc_;
    t.max_t_degree = std::max(0, t.max_t_degree - 1);
    GradedSeries out(space_, t);
    for (const auto& [m, c] : terms_) {
      const int mult = m.multiplicity(id);
      if (mult == 0) continue;
      int sign = 1;
      if (space_->odd(id))
        for (const auto& [v, k] : m.vars)
          if (v < id && space_->odd(v) && k % 2 != 0) sign = -sign;
      Monomial r = m;
      for (auto it = r.vars.begin(); it != r.vars.end(); ++it)
        if (it->first == id) {
          if (--it->second == 0) r.vars.erase(it);
          break;
        }
      out.add_term(r, sign * mult * c);
    }
    return out;
  }

  /// Multiplies each coefficient by the t-degree of its monomial.
  GradedSeries euler() const {
    GradedSeries out(space_, trunc_);
    for (const auto& [m, c] : terms_) out.add_term(m, m.t_degree() * c);
    return out;
  }

  /// lambda d/dlambda.
  GradedSeries lambda_euler() const {
    GradedSeries out(space_, trunc_);
    for (const auto& [m, c] : terms_) out.add_term(m, m.lambda * c);
    return out;
  }

  /// Drops terms of t-degree above max_t_degree and lowers the truncation.
  GradedSeries truncated(int max_t_degree) const {
    Truncation t = trunc_;
    t.max_t_degree = std::min(max_t_degree, trunc_.max_t_degree);
    GradedSeries out(space_, t);
    for (const auto& [m, c] : terms_) out.add_term(m, c);
    return out;
  }

  std::string monomial_string(const Monomial& m) const {
    std::string s;
    for (const auto& [id, k] : m.vars) {
      if (!s.empty()) s += ' ';
      s += space_->name(id);
      if (k > 1) s += "^" + std::to_string(k);
    }
    if (m.q != 0) s += (s.empty() ? "" : " ") + std::string("q^") + std::to_string(m.q);
    if (m.lambda != 0) s += (s.empty() ? "" : " ") + std::string("lambda^") + std::to_string(m.lambda);
    return s.empty() ? "1" : s;
  }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [m, c] : terms_) j[monomial_string(m)] = to_fraction_string(c);
    return j;
  }

  friend bool operator==(const GradedSeries& a, const GradedSeries& b) {
    return *a.space_ == *b.space_ && a.trunc_ == b.trunc_ && a.terms_ == b.terms_;
  }

 private:
  bool within(const Monomial& m) const {
    if (m.t_degree() > trunc_.max_t_degree || m.q > trunc_.max_q) return false;
    for (const auto& v : m.vars)
      if (space_->descendant(v.first) > trunc_.max_descendant) return false;
    return true;
  }

  void check_compatible(const GradedSeries& o) const {
    if (!(*space_ == *o.space_)) throw Error("series over different variable sets");
    if (!(trunc_ == o.trunc_)) throw Error("series truncations differ");
  }

  std::optional<Monomial> multiply_monomials(const Monomial& a, const Monomial& b, int& sign) const {
    // Sign of sorting the concatenation a*b: odd pairs (u in a, v in b) with u > v.
    for (const auto& [v, kv] : b.vars) {
      if (!space_->odd(v)) continue;
      for (const auto& [u, ku] : a.vars) {
        if (!space_->odd(u)) continue;
        if (u == v) return std::nullopt;
        if (u > v && (ku * kv) % 2 != 0) sign = -sign;
      }
    }
    Monomial m;
    m.q = a.q + b.q;
    m.lambda = a.lambda + b.lambda;
    std::size_t i = 0, j = 0;
    while (i < a.vars.size() || j < b.vars.size()) {
      if (j == b.vars.size() || (i < a.vars.size() && a.vars[i].first < b.vars[j].first)) {
        m.vars.push_back(a.vars[i++]);
      } else if (i == a.vars.size() || b.vars[j].first < a.vars[i].first) {
        m.vars.push_back(b.vars[j++]);
      } else {
        m.vars.push_back({a.vars[i].first, a.vars[i].second + b.vars[j].second});
        ++i;
        ++j;
      }
    }
    return m;
  }

  std::shared_ptr<const VariableSpace> space_;
  Truncation trunc_;
  std::map<Monomial, Rational> terms_;
};

/// Monomial t_{a_l i_l} ... t_{a_1 i_1} of a canonical key, in canonical
/// order, together with the sign of that reordering and 1/prod(mult!).
inline std::pair<Monomial, Rational> key_monomial(const VariableSpace& space, const InvariantKey& k, int q, int lambda) {
  Monomial m;
  m.q = q;
  m.lambda = lambda;
  int odd = 0;
  Rational coeff = 1;
  for (const auto& ins : k.insertions) {
    const int id = space.id(ins.a, ins.basis);
    if (space.odd(id)) ++odd;
    if (!m.vars.empty() && m.vars.back().first == id)
      ++m.vars.back().second;
    else
      m.vars.push_back({id, 1});
  }
  for (const auto& [id, mult] : m.vars) coeff /= factorial(mult);
  if ((odd * (odd - 1) / 2) % 2 != 0) coeff = -coeff;
  return {m, coeff};
}

struct Potentials {
  std::shared_ptr<const VariableSpace> space;
  Truncation truncation;
  std::optional<GradedSeries> phi;          // primary complex
  std::optional<GradedSeries> f0;           // descendant complex, lambda^-2 window
  std::optional<GradedSeries> phi_real;     // complex invariants over doubled degrees
  std::optional<GradedSeries> omega;        // primary real
  std::optional<GradedSeries> f0_real;      // descendant real, lambda^-1 window
};

namespace detail {

template <class Eval>
GradedSeries build_series(const TargetSpace& t, std::shared_ptr<const VariableSpace> space, Truncation trunc,
                          Kind kind, int max_a, int lambda, bool halve, const std::vector<std::pair<int, int>>& degrees,
                          Eval&& value, int threads) {
  GradedSeries out(space, trunc);
  for (const auto& [d, q] : degrees) {
    const auto keys = enumerate_keys(t, kind, d, max_a, trunc.max_t_degree);
    const auto values = parallel_map<Rational>(keys.size(), threads, [&](std::size_t i) { return value(keys[i]); });
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (values[i] == 0) continue;
      auto [m, c] = key_monomial(*space, keys[i], q, lambda);
      if (halve) c /= power_of_two(keys[i].length());
      out.add_term(m, c * values[i]);
    }
  }
  return out;
}

}  // namespace detail

/// Builds every potential the table supports within the truncation. The
/// table must hold the complex primaries to max_q (or to the complex degrees
/// the real potentials need) and the real primaries to max_q.
inline Potentials build_potentials(const InvariantTable& table, Truncation trunc, bool include_real, int threads = 0) {
  const TargetSpace& t = table.target();
  Potentials p;
  p.truncation = trunc;
  p.space = std::make_shared<const VariableSpace>(t, trunc.max_descendant);
  ComplexInvariants complex(table);
  std::vector<std::pair<int, int>> complex_degrees;
  const int complex_max = complex_degree_available(table);
  for (int d = 0; d <= std::min(trunc.max_q, complex_max); ++d) complex_degrees.push_back({d, d});
  if (!include_real || complex_max >= trunc.max_q) {
    p.phi = detail::build_series(t, p.space, trunc, Kind::complex, 0, 0, false, complex_degrees,
                                 [&](const InvariantKey& k) { return complex.value(k); }, threads);
    p.f0 = detail::build_series(t, p.space, trunc, Kind::complex, trunc.max_descendant, -2, false, complex_degrees,
                                [&](const InvariantKey& k) { return complex.value(k); }, threads);
  }
  if (include_real) {
    RealInvariants real(table, complex);
    std::vector<std::pair<int, int>> doubled, real_degrees;
    for (int dp = 0; real_degree_map(dp, t) <= trunc.max_q; ++dp) doubled.push_back({dp, real_degree_map(dp, t)});
    for (int d = 0; d <= trunc.max_q; ++d) real_degrees.push_back({d, d});
    p.phi_real = detail::build_series(t, p.space, trunc, Kind::complex, 0, 0, false, doubled,
                                      [&](const InvariantKey& k) { return complex.value(k); }, threads);
    p.omega = detail::build_series(t, p.space, trunc, Kind::real, 0, 0, true, real_degrees,
                                   [&](const InvariantKey& k) { return real.value(k); }, threads);
    p.f0_real = detail::build_series(t, p.space, trunc, Kind::real, trunc.max_descendant, -1, true, real_degrees,
                                     [&](const InvariantKey& k) { return real.value(k); }, threads);
  }
  return p;
}

/// dF/dt_{0,unit} - (1/2) lambda^-2 sum g_ij t_0j t_0i - sum t_{a+1,i} dF/dt_{ai}.
inline GradedSeries residual_string_complex(const GradedSeries& f, const TargetSpace& t) {
  const int T = f.truncation().max_t_degree - 1;
  const auto& sp = f.space_ptr();
  GradedSeries lhs = f.derivative(0, 0).truncated(T);
  GradedSeries rhs(sp, lhs.truncation());
  for (int i = 0; i < sp->rank(); ++i)
    for (int j = 0; j < sp->rank(); ++j) {
      const Rational& g = t.pairing()[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (g == 0) continue;
      GradedSeries term = GradedSeries::variable(sp, lhs.truncation(), 0, j) *
                          GradedSeries::variable(sp, lhs.truncation(), 0, i) *
                          GradedSeries::constant(sp, lhs.truncation(), 1, 0, -2);
      rhs += Rational(g / 2) * term;
    }
  for (int a = 0; a + 1 <= f.truncation().max_descendant; ++a)
    for (int i = 0; i < sp->rank(); ++i)
      rhs += GradedSeries::variable(sp, lhs.truncation(), a + 1, i) * f.derivative(a, i).truncated(T);
  return lhs - rhs;
}

/// dF/dt_{1,unit} - (lambda d/dlambda + sum t_{ai} d/dt_{ai}) F. The constant
/// chi/24 belongs to genus 1 and is outside the genus-0 window.
inline GradedSeries residual_dilaton(const GradedSeries& f) {
  const int T = f.truncation().max_t_degree - 1;
  GradedSeries lhs = f.derivative(1, 0).truncated(T);
  GradedSeries rhs = f.lambda_euler().truncated(T);
  rhs += f.euler().truncated(T);
  return lhs - rhs;
}

inline GradedSeries residual_dilaton_complex(const GradedSeries& f) { return residual_dilaton(f); }
inline GradedSeries residual_dilaton_real(const GradedSeries& f) { return residual_dilaton(f); }

inline GradedSeries residual_string_real(const GradedSeries& f) { return f.derivative(0, 0); }

namespace detail {

inline GradedSeries d(const GradedSeries& f, std::initializer_list<int> basis) {
  // Applied right to left so that the leftmost index acts last.
  std::vector<int> idx(basis);
  GradedSeries out = f;
  for (auto it = idx.rbegin(); it != idx.rend(); ++it) out = out.derivative(0, *it);
  return out;
}

}  // namespace detail

inline GradedSeries residual_wdvv_pde(const GradedSeries& phi, const TargetSpace& t, int i1, int i2, int i3, int i4) {
  const int T = phi.truncation().max_t_degree - 3;
  const auto& ginv = t.pairing_inverse();
  const auto& deg = t.basis_degrees();
  GradedSeries lhs(phi.space_ptr(), phi.truncation()), rhs(phi.space_ptr(), phi.truncation());
  lhs = lhs.truncated(T);
  rhs = rhs.truncated(T);
  for (int j = 0; j < static_cast<int>(t.rank()); ++j)
    for (int k = 0; k < static_cast<int>(t.rank()); ++k) {
      const Rational& g = ginv[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      if (g == 0) continue;
      lhs += g * (detail::d(phi, {i1, i2, j}).truncated(T) * detail::d(phi, {k, i3, i4}).truncated(T));
      rhs += g * (detail::d(phi, {i2, i3, j}).truncated(T) * detail::d(phi, {k, i1, i4}).truncated(T));
    }
  const int e = deg[static_cast<std::size_t>(i1)] * (deg[static_cast<std::size_t>(i2)] + deg[static_cast<std::size_t>(i3)]);
  if (e % 2 != 0) rhs *= -1;
  return lhs - rhs;
}

/// Residual of the real WDVV-type equation for e_{i1} in H_+ and e_{i2},
/// e_{i3} in H_-. The equation holds on monomials in the H_- variables only,
/// so the residual is restricted to those.
inline GradedSeries residual_rwdvv_pde(const GradedSeries& phi_real, const GradedSeries& omega, const TargetSpace& t,
                                       int i1, int i2, int i3) {
  if (t.involution_sign(static_cast<std::size_t>(i1)) != 1) throw Error("first index must lie in H_+");
  if (t.involution_sign(static_cast<std::size_t>(i2)) != -1 || t.involution_sign(static_cast<std::size_t>(i3)) != -1)
    throw Error("second and third indices must lie in H_-");
  const int T = phi_real.truncation().max_t_degree - 3;
  const auto& ginv = t.pairing_inverse();
  const auto& deg = t.basis_degrees();
  GradedSeries lhs = GradedSeries(phi_real.space_ptr(), phi_real.truncation()).truncated(T);
  GradedSeries rhs = lhs;
  for (int j = 0; j < static_cast<int>(t.rank()); ++j)
    for (int k = 0; k < static_cast<int>(t.rank()); ++k) {
      const Rational& g = ginv[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      if (g == 0) continue;
      lhs += g * (detail::d(phi_real, {i1, i2, j}).truncated(T) * detail::d(omega, {k, i3}).truncated(T));
      rhs += g * (detail::d(phi_real, {i1, i3, j}).truncated(T) * detail::d(omega, {k, i2}).truncated(T));
    }
  if ((deg[static_cast<std::size_t>(i2)] * deg[static_cast<std::size_t>(i3)]) % 2 != 0) rhs *= -1;
  const GradedSeries diff = lhs - rhs;
  GradedSeries out(diff.space_ptr(), diff.truncation());
  for (const auto& [m, c] : diff.terms()) {
    bool minus = true;
    for (const auto& v : m.vars)
      if (t.involution_sign(static_cast<std::size_t>(diff.space().basis(v.first))) != -1) minus = false;
    if (minus) out.add_term(m, c);
  }
  return out;
}

}  // namespace gwcalc
