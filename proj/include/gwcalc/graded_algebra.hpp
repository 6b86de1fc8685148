#pragma once

// Graded cohomology rings of target spaces: cup product, intersection
// pairing, involution pullback and the diagonal class.

#include <gwcalc/rational.hpp>

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gwcalc {

/// Raw ring data. Validated when wrapped in a TargetSpace.
struct TargetData {
  std::string name;
  int complex_dim = 0;
  std::vector<int> basis_degrees;
  /// mult_table[i][j][k]: coefficient of e_k in e_i * e_j.
  std::vector<RationalMatrix> mult_table;
  RationalMatrix pairing;
  /// phi^* e_i = s_i e_i. Empty when the target carries no involution
  /// or when involution_matrix is used instead.
  std::vector<int> involution_signs;
  /// Full-matrix fallback: phi^* e_j = sum_i M[i][j] e_i.
  std::optional<RationalMatrix> involution_matrix;
  int c1_pairing = 0;
  int degree_negation = 1;
  int euler_char = 0;
  bool fixed_locus_empty = false;
};

/// Exact-rational coefficient vector over the basis of a TargetSpace.
struct CohClass {
  std::vector<Rational> coeffs;

  CohClass() = default;
  explicit CohClass(std::size_t size) : coeffs(size) {}

  static CohClass basis(std::size_t size, std::size_t index) {
    CohClass c(size);
    c.coeffs.at(index) = 1;
    return c;
  }

  std::size_t size() const { return coeffs.size(); }

  bool is_zero() const {
    for (const auto& c : coeffs)
      if (c != 0) return false;
    return true;
  }

  CohClass& operator+=(const CohClass& other) {
    check_size(other);
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += other.coeffs[i];
    return *this;
  }
  CohClass& operator-=(const CohClass& other) {
    check_size(other);
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= other.coeffs[i];
    return *this;
  }
  CohClass& operator*=(const Rational& s) {
    for (auto& c : coeffs) c *= s;
    return *this;
  }

  friend CohClass operator+(CohClass a, const CohClass& b) { return a += b; }
  friend CohClass operator-(CohClass a, const CohClass& b) { return a -= b; }
  friend CohClass operator*(const Rational& s, CohClass a) { return a *= s; }
  friend bool operator==(const CohClass& a, const CohClass& b) { return a.coeffs == b.coeffs; }

 private:
  void check_size(const CohClass& other) const {
    if (other.coeffs.size() != coeffs.size()) throw Error("cohomology classes over different bases");
  }
};

namespace detail {

inline RationalMatrix identity_matrix(std::size_t n) {
  RationalMatrix m(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b) {
  const std::size_t n = a.size();
  const std::size_t k = b.size();
  const std::size_t m = k == 0 ? 0 : b[0].size();
  RationalMatrix out(n, std::vector<Rational>(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (a[i][l] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) out[i][j] += a[i][l] * b[l][j];
    }
  return out;
}

}  // namespace detail

/// Gauss-Jordan inverse over the rationals. Throws on singular input.
inline RationalMatrix invert_matrix(const RationalMatrix& input) {
  const std::size_t n = input.size();
  for (const auto& row : input)
    if (row.size() != n) throw Error("matrix is not square");
  RationalMatrix a = input;
  RationalMatrix inv = detail::identity_matrix(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) throw Error("singular pairing matrix");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const Rational scale = 1 / a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] *= scale;
      inv[col][j] *= scale;
    }
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col || a[row][col] == 0) continue;
      const Rational f = a[row][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[row][j] -= f * a[col][j];
        inv[row][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

/// Immutable graded ring with pairing, unit and (optional) involution.
class TargetSpace {
 public:
  explicit TargetSpace(TargetData data) : data_(std::move(data)) {
    validate();
    pairing_inverse_ = invert_matrix(data_.pairing);
    projective_ = detect_projective();
  }

  const TargetData& data() const { return data_; }
  const std::string& name() const { return data_.name; }
  int complex_dim() const { return data_.complex_dim; }
  std::size_t rank() const { return data_.basis_degrees.size(); }
  int degree(std::size_t i) const { return data_.basis_degrees.at(i); }
  const std::vector<int>& basis_degrees() const { return data_.basis_degrees; }
  const RationalMatrix& pairing() const { return data_.pairing; }
  const RationalMatrix& pairing_inverse() const { return pairing_inverse_; }
  int c1_pairing() const { return data_.c1_pairing; }
  int degree_negation() const { return data_.degree_negation; }
  int euler_char() const { return data_.euler_char; }
  bool fixed_locus_empty() const { return data_.fixed_locus_empty; }

  bool has_involution() const {
    return !data_.involution_signs.empty() || data_.involution_matrix.has_value();
  }
  bool involution_is_diagonal() const { return !data_.involution_signs.empty(); }
  /// Sign s_i with phi^* e_i = s_i e_i; requires a diagonal involution.
  int involution_sign(std::size_t i) const {
    if (!involution_is_diagonal()) throw Error("target " + name() + " has no diagonal involution");
    return data_.involution_signs.at(i);
  }

  bool has_odd_classes() const {
    for (int d : data_.basis_degrees)
      if (d % 2 != 0) return true;
    return false;
  }

  /// True for the truncated polynomial rings Q[h]/(h^{N+1}) with
  /// anti-diagonal pairing built by projective_space/make_projective.
  bool is_projective() const { return projective_; }

  /// Index of the top-degree (point) class for projective targets.
  std::size_t point_index() const { return rank() - 1; }

  /// Basis element e_i as a class.
  CohClass basis_class(std::size_t i) const { return CohClass::basis(rank(), i); }

  friend bool operator==(const TargetSpace& a, const TargetSpace& b) {
    const auto& x = a.data_;
    const auto& y = b.data_;
    return x.name == y.name && x.complex_dim == y.complex_dim && x.basis_degrees == y.basis_degrees &&
           x.mult_table == y.mult_table && x.pairing == y.pairing && x.involution_signs == y.involution_signs &&
           x.involution_matrix == y.involution_matrix && x.c1_pairing == y.c1_pairing &&
           x.degree_negation == y.degree_negation && x.euler_char == y.euler_char &&
           x.fixed_locus_empty == y.fixed_locus_empty;
  }

 private:
  void validate() const {
    const std::size_t n = data_.basis_degrees.size();
    if (n == 0) throw Error("empty basis");
    if (data_.complex_dim < 0) throw Error("negative complex dimension");
    if (data_.basis_degrees[0] != 0) throw Error("first basis element must have degree 0");
    for (std::size_t i = 1; i < n; ++i)
      if (data_.basis_degrees[i] < data_.basis_degrees[i - 1]) throw Error("basis must be ordered by degree");
    if (data_.mult_table.size() != n || data_.pairing.size() != n) throw Error("ring data has the wrong size");
    for (std::size_t i = 0; i < n; ++i) {
      if (data_.mult_table[i].size() != n || data_.pairing[i].size() != n) throw Error("ring data has the wrong size");
      for (std::size_t j = 0; j < n; ++j)
        if (data_.mult_table[i][j].size() != n) throw Error("ring data has the wrong size");
    }
    const int top = 2 * data_.complex_dim;
    for (std::size_t i = 0; i < n; ++i) {
      // unit
      for (std::size_t k = 0; k < n; ++k) {
        const Rational expect = (k == i) ? 1 : 0;
        if (data_.mult_table[0][i][k] != expect || data_.mult_table[i][0][k] != expect)
          throw Error("e_1 is not a multiplicative unit");
      }
      for (std::size_t j = 0; j < n; ++j) {
        const int di = data_.basis_degrees[i];
        const int dj = data_.basis_degrees[j];
        const int sign = (di % 2 != 0 && dj % 2 != 0) ? -1 : 1;
        if (data_.pairing[i][j] != sign * data_.pairing[j][i]) throw Error("pairing is not graded-symmetric");
        if (data_.pairing[i][j] != 0 && di + dj != top) throw Error("pairing does not respect the grading");
        for (std::size_t k = 0; k < n; ++k) {
          if (data_.mult_table[i][j][k] == 0) continue;
          if (data_.basis_degrees[k] != di + dj) throw Error("cup product does not respect the grading");
          if (data_.mult_table[j][i][k] != sign * data_.mult_table[i][j][k])
            throw Error("cup product is not graded-commutative");
        }
      }
    }
    if (!data_.involution_signs.empty()) {
      if (data_.involution_signs.size() != n) throw Error("involution_signs has the wrong size");
      for (int s : data_.involution_signs)
        if (s != 1 && s != -1) throw Error("involution signs must be +1 or -1");
      if (data_.involution_signs[0] != 1) throw Error("involution must fix the unit");
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k)
            if (data_.mult_table[i][j][k] != 0 &&
                data_.involution_signs[i] * data_.involution_signs[j] != data_.involution_signs[k])
              throw Error("involution pullback is not a ring map");
    }
    if (data_.involution_matrix) {
      const auto& m = *data_.involution_matrix;
      if (m.size() != n) throw Error("involution_matrix has the wrong size");
      for (const auto& row : m)
        if (row.size() != n) throw Error("involution_matrix has the wrong size");
      if (detail::multiply(m, m) != detail::identity_matrix(n)) throw Error("involution pullback is not an involution");
    }
  }

  bool detect_projective() const {
    const std::size_t n = rank();
    if (data_.complex_dim != static_cast<int>(n) - 1) return false;
    for (std::size_t i = 0; i < n; ++i) {
      if (data_.basis_degrees[i] != 2 * static_cast<int>(i)) return false;
      for (std::size_t j = 0; j < n; ++j) {
        if (data_.pairing[i][j] != ((i + j == n - 1) ? 1 : 0)) return false;
        for (std::size_t k = 0; k < n; ++k)
          if (data_.mult_table[i][j][k] != ((i + j == k) ? 1 : 0)) return false;
      }
    }
    return true;
  }

  TargetData data_;
  RationalMatrix pairing_inverse_;
  bool projective_ = false;
};

enum class Involution { tau, eta };

namespace detail {

inline TargetData projective_ring(int dim) {
  if (dim < 1) throw Error("projective space needs positive dimension");
  const std::size_t n = static_cast<std::size_t>(dim) + 1;
  TargetData d;
  d.name = "P" + std::to_string(dim);
  d.complex_dim = dim;
  d.mult_table.assign(n, RationalMatrix(n, std::vector<Rational>(n)));
  d.pairing.assign(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) {
    d.basis_degrees.push_back(2 * static_cast<int>(i));
    for (std::size_t j = 0; j < n; ++j) {
      if (i + j < n) d.mult_table[i][j][i + j] = 1;
      if (i + j == n - 1) d.pairing[i][j] = 1;
    }
  }
  d.c1_pairing = dim + 1;
  d.euler_char = dim + 1;
  d.degree_negation = 1;
  return d;
}

}  // namespace detail

/// Complex projective space P^dim without an involution.
inline TargetSpace projective_space(int dim) { return TargetSpace(detail::projective_ring(dim)); }

/// P^{2m-1} with the involution tau or eta; phi^* h^k = (-1)^k h^k.
inline TargetSpace make_projective(int m, Involution involution) {
  if (m < 1) throw Error("make_projective needs m >= 1 (target P^{2m-1} has odd complex dimension)");
  TargetData d = detail::projective_ring(2 * m - 1);
  d.name += involution == Involution::tau ? "-tau" : "-eta";
  for (int k = 0; k < 2 * m; ++k) d.involution_signs.push_back(k % 2 == 0 ? 1 : -1);
  d.fixed_locus_empty = involution == Involution::eta;
  return TargetSpace(std::move(d));
}

/// Builds a target from names such as "P2", "P3-tau" or "P5-eta".
inline TargetSpace target_from_name(const std::string& name) {
  if (name.size() < 2 || name[0] != 'P') throw Error("unknown target name: " + name);
  const auto dash = name.find('-');
  const std::string digits = name.substr(1, dash == std::string::npos ? std::string::npos : dash - 1);
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    throw Error("unknown target name: " + name);
  const int dim = std::stoi(digits);
  if (dash == std::string::npos) return projective_space(dim);
  const std::string inv = name.substr(dash + 1);
  if (inv != "tau" && inv != "eta") throw Error("unknown involution in target name: " + name);
  if (dim % 2 == 0) throw Error("real targets need odd complex dimension: " + name);
  return make_projective((dim + 1) / 2, inv == "tau" ? Involution::tau : Involution::eta);
}

inline CohClass cup(const TargetSpace& t, const CohClass& a, const CohClass& b) {
  const std::size_t n = t.rank();
  if (a.size() != n || b.size() != n) throw Error("class does not belong to target " + t.name());
  CohClass out(n);
  const auto& mt = t.data().mult_table;
  for (std::size_t i = 0; i < n; ++i) {
    if (a.coeffs[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (b.coeffs[j] == 0) continue;
      const Rational ab = a.coeffs[i] * b.coeffs[j];
      for (std::size_t k = 0; k < n; ++k)
        if (mt[i][j][k] != 0) out.coeffs[k] += ab * mt[i][j][k];
    }
  }
  return out;
}

/// <a, [X]>: the top-degree part of a evaluated on the fundamental class.
inline Rational integrate(const TargetSpace& t, const CohClass& a) {
  Rational out = 0;
  for (std::size_t i = 0; i < t.rank(); ++i)
    if (a.coeffs.at(i) != 0) out += a.coeffs[i] * t.pairing()[0][i];
  return out;
}

inline const RationalMatrix& pairing_inverse(const TargetSpace& t) { return t.pairing_inverse(); }

/// Degree of a homogeneous nonzero class; nullopt for zero or mixed classes.
inline std::optional<int> homogeneous_degree(const TargetSpace& t, const CohClass& a) {
  std::optional<int> deg;
  for (std::size_t i = 0; i < t.rank(); ++i) {
    if (a.coeffs.at(i) == 0) continue;
    if (deg && *deg != t.degree(i)) return std::nullopt;
    deg = t.degree(i);
  }
  return deg;
}

struct DiagonalTerm {
  Rational coeff;
  std::size_t left;
  std::size_t right;
  friend bool operator==(const DiagonalTerm&, const DiagonalTerm&) = default;
};

/// Nonzero terms g_{ij} e_i x e_j of the diagonal class.
inline std::vector<DiagonalTerm> diagonal_decomposition(const TargetSpace& t) {
  std::vector<DiagonalTerm> out;
  for (std::size_t i = 0; i < t.rank(); ++i)
    for (std::size_t j = 0; j < t.rank(); ++j)
      if (t.pairing()[i][j] != 0) out.push_back({t.pairing()[i][j], i, j});
  return out;
}

inline CohClass pullback(const TargetSpace& t, const CohClass& a) {
  if (!t.has_involution()) throw Error("target " + t.name() + " has no involution");
  CohClass out(t.rank());
  if (t.involution_is_diagonal()) {
    for (std::size_t i = 0; i < t.rank(); ++i) out.coeffs[i] = t.involution_sign(i) * a.coeffs.at(i);
    return out;
  }
  const auto& m = *t.data().involution_matrix;
  for (std::size_t i = 0; i < t.rank(); ++i)
    for (std::size_t j = 0; j < t.rank(); ++j)
      if (m[i][j] != 0) out.coeffs[i] += m[i][j] * a.coeffs.at(j);
  return out;
}

/// (a_+, a_-) with phi^* a_+ = a_+ and phi^* a_- = -a_-.
inline std::pair<CohClass, CohClass> plus_minus_decompose(const TargetSpace& t, const CohClass& a) {
  const CohClass image = pullback(t, a);
  const Rational half = make_rational(1, 2);
  return {half * (a + image), half * (a - image)};
}

// JSON form of targets. Rationals are "p/q" strings.

namespace detail {

inline nlohmann::json matrix_to_json(const RationalMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : m) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& x : row) r.push_back(to_fraction_string(x));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline RationalMatrix matrix_from_json(const nlohmann::json& j) {
  RationalMatrix m;
  for (const auto& row : j) {
    std::vector<Rational> r;
    for (const auto& x : row) r.push_back(parse_rational(x.get<std::string>()));
    m.push_back(std::move(r));
  }
  return m;
}

}  // namespace detail

inline nlohmann::json to_json(const TargetSpace& t) {
  const auto& d = t.data();
  nlohmann::json j;
  j["name"] = d.name;
  j["complex_dim"] = d.complex_dim;
  j["basis_degrees"] = d.basis_degrees;
  nlohmann::json mult = nlohmann::json::array();
  for (const auto& m : d.mult_table) mult.push_back(detail::matrix_to_json(m));
  j["mult_table"] = std::move(mult);
  j["pairing"] = detail::matrix_to_json(d.pairing);
  j["involution_signs"] = d.involution_signs;
  if (d.involution_matrix) j["involution_matrix"] = detail::matrix_to_json(*d.involution_matrix);
  j["c1_pairing"] = d.c1_pairing;
  j["degree_negation"] = d.degree_negation;
  j["euler_char"] = d.euler_char;
  j["fixed_locus_empty"] = d.fixed_locus_empty;
  return j;
}

inline TargetSpace target_from_json(const nlohmann::json& j) {
  try {
    TargetData d;
    d.name = j.at("name").get<std::string>();
    d.complex_dim = j.at("complex_dim").get<int>();
    d.basis_degrees = j.at("basis_degrees").get<std::vector<int>>();
    for (const auto& m : j.at("mult_table")) d.mult_table.push_back(detail::matrix_from_json(m));
    d.pairing = detail::matrix_from_json(j.at("pairing"));
    d.involution_signs = j.at("involution_signs").get<std::vector<int>>();
    if (j.contains("involution_matrix")) d.involution_matrix = detail::matrix_from_json(j.at("involution_matrix"));
    d.c1_pairing = j.at("c1_pairing").get<int>();
    d.degree_negation = j.at("degree_negation").get<int>();
    d.euler_char = j.at("euler_char").get<int>();
    d.fixed_locus_empty = j.at("fixed_locus_empty").get<bool>();
    return TargetSpace(std::move(d));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed target JSON: ") + e.what());
  }
}

}  // namespace gwcalc
