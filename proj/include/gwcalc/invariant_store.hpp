#pragma once

// Canonical invariant keys, the memo table, and its JSON/CSV persistence.

#include <gwcalc/combinatorics.hpp>
#include <gwcalc/graded_algebra.hpp>
#include <gwcalc/rational.hpp>

#include <json.hpp>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

namespace gwcalc {

enum class Kind { complex, real };

inline std::string kind_name(Kind k) { return k == Kind::complex ? "complex" : "real"; }

inline Kind parse_kind(const std::string& s) {
  if (s == "complex") return Kind::complex;
  if (s == "real") return Kind::real;
  throw Error("unknown invariant kind: " + s);
}

/// tau_a(cls) with a general (possibly mixed) class.
struct Insertion {
  int a = 0;
  CohClass cls;
};

/// tau_a(e_basis).
struct BasisInsertion {
  int a = 0;
  int basis = 0;
  auto operator<=>(const BasisInsertion&) const = default;
};

struct InvariantKey {
  Kind kind = Kind::complex;
  int genus = 0;
  int degree = 0;
  std::vector<BasisInsertion> insertions;

  auto operator<=>(const InvariantKey&) const = default;

  int length() const { return static_cast<int>(insertions.size()); }
  int total_psi() const {
    int s = 0;
    for (const auto& ins : insertions) s += ins.a;
    return s;
  }
  bool is_primary() const { return total_psi() == 0; }
};

/// "complex g=0 d=1 <tau0(e2) tau0(e2)>"
inline std::string to_string(const InvariantKey& k) {
  std::ostringstream out;
  out << kind_name(k.kind) << " g=" << k.genus << " d=" << k.degree << " <";
  for (std::size_t i = 0; i < k.insertions.size(); ++i) {
    if (i) out << ' ';
    out << "tau" << k.insertions[i].a << "(e" << k.insertions[i].basis << ")";
  }
  out << ">";
  return out.str();
}

struct KeyTerm {
  Rational coeff;
  InvariantKey key;
};

/// Whether R1's eigenspace condition kills tau_a(e_b) in a real invariant.
inline bool real_parity_vanishes(const TargetSpace& t, int a, int basis) {
  const int wrong = (a % 2 == 0) ? 1 : -1;
  return t.involution_sign(static_cast<std::size_t>(basis)) == wrong;
}

/// Sorts basis insertions, returning the Koszul sign of the reordering, or 0
/// when two equal odd-degree insertions force the invariant to vanish.
inline int canonicalize_insertions(const TargetSpace& t, std::vector<BasisInsertion>& ins) {
  const std::size_t n = ins.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return ins[x] < ins[y]; });
  // perm maps old slot i to its new 1-based position.
  std::vector<int> perm(n), degs(n);
  bool any_odd = false;
  for (std::size_t pos = 0; pos < n; ++pos) perm[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos) + 1;
  for (std::size_t i = 0; i < n; ++i) {
    degs[i] = t.degree(static_cast<std::size_t>(ins[i].basis));
    any_odd = any_odd || degs[i] % 2 != 0;
  }
  std::vector<BasisInsertion> sorted(n);
  for (std::size_t pos = 0; pos < n; ++pos) sorted[pos] = ins[static_cast<std::size_t>(order[pos])];
  ins = std::move(sorted);
  if (!any_odd) return 1;
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (ins[i] == ins[i + 1] && t.degree(static_cast<std::size_t>(ins[i].basis)) % 2 != 0) return 0;
  return koszul_sign_permutation(perm, degs);
}

/// Multilinear expansion of a raw insertion list into canonical keys.
/// Real keys drop expansions that R1's eigenspace condition kills.
inline std::vector<KeyTerm> normalize(const TargetSpace& t, Kind kind, int genus, int degree,
                                      const std::vector<Insertion>& raw) {
  std::map<InvariantKey, Rational> acc;
  const std::size_t n = raw.size();
  std::vector<std::vector<std::pair<int, Rational>>> options(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (raw[i].cls.size() != t.rank()) throw Error("insertion class does not belong to target " + t.name());
    for (std::size_t b = 0; b < t.rank(); ++b) {
      if (raw[i].cls.coeffs[b] == 0) continue;
      if (kind == Kind::real && real_parity_vanishes(t, raw[i].a, static_cast<int>(b))) continue;
      options[i].push_back({static_cast<int>(b), raw[i].cls.coeffs[b]});
    }
    if (options[i].empty()) return {};
  }
  std::vector<std::size_t> choice(n, 0);
  while (true) {
    InvariantKey key{kind, genus, degree, {}};
    Rational coeff = 1;
    for (std::size_t i = 0; i < n; ++i) {
      key.insertions.push_back({raw[i].a, options[i][choice[i]].first});
      coeff *= options[i][choice[i]].second;
    }
    const int sign = canonicalize_insertions(t, key.insertions);
    if (sign != 0) acc[key] += sign * coeff;
    std::size_t pos = 0;
    while (pos < n && choice[pos] + 1 == options[pos].size()) choice[pos++] = 0;
    if (pos == n) break;
    ++choice[pos];
  }
  std::vector<KeyTerm> out;
  for (auto& [k, c] : acc)
    if (c != 0) out.push_back({c, k});
  return out;
}

/// Convenience form taking basis insertions directly.
inline std::vector<KeyTerm> normalize(const TargetSpace& t, Kind kind, int genus, int degree,
                                      const std::vector<BasisInsertion>& ins) {
  std::vector<Insertion> raw;
  raw.reserve(ins.size());
  for (const auto& b : ins) raw.push_back({b.a, t.basis_class(static_cast<std::size_t>(b.basis))});
  return normalize(t, kind, genus, degree, raw);
}

enum class Provenance { seed, classical, wdvv, rwdvv, trr, rtrr, axiom_reduction };

inline std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::seed: return "seed";
    case Provenance::classical: return "classical";
    case Provenance::wdvv: return "wdvv";
    case Provenance::rwdvv: return "rwdvv";
    case Provenance::trr: return "trr";
    case Provenance::rtrr: return "rtrr";
    case Provenance::axiom_reduction: return "axiom-reduction";
  }
  return "unknown";
}

inline Provenance parse_provenance(const std::string& s) {
  for (auto p : {Provenance::seed, Provenance::classical, Provenance::wdvv, Provenance::rwdvv, Provenance::trr,
                 Provenance::rtrr, Provenance::axiom_reduction})
    if (provenance_name(p) == s) return p;
  throw Error("unknown provenance: " + s);
}

class ConflictError : public Error {
 public:
  ConflictError(const InvariantKey& key, const Rational& old_value, const Rational& new_value)
      : Error("conflicting values for " + to_string(key) + ": " + to_display_string(old_value) + " vs " +
              to_display_string(new_value)),
        key_(key) {}
  const InvariantKey& key() const { return key_; }

 private:
  InvariantKey key_;
};

struct TableEntry {
  Rational value;
  Provenance provenance;
  friend bool operator==(const TableEntry&, const TableEntry&) = default;
};

inline constexpr int cache_schema_version = 1;

/// Thread-safe map from canonical keys to exact values. Conflicting puts throw.
class InvariantTable {
 public:
  explicit InvariantTable(TargetSpace target, int seed_sign = 1) : target_(std::move(target)), seed_sign_(seed_sign) {}

  InvariantTable(const InvariantTable& other) : target_(other.target_), seed_sign_(other.seed_sign_) {
    std::shared_lock lock(other.mutex_);
    entries_ = other.entries_;
  }
  InvariantTable& operator=(const InvariantTable& other) {
    if (this == &other) return *this;
    std::map<InvariantKey, TableEntry> copy;
    {
      std::shared_lock lock(other.mutex_);
      copy = other.entries_;
    }
    std::unique_lock lock(mutex_);
    target_ = other.target_;
    seed_sign_ = other.seed_sign_;
    entries_ = std::move(copy);
    return *this;
  }

  const TargetSpace& target() const { return target_; }
  int seed_sign() const { return seed_sign_; }

  std::optional<Rational> get(const InvariantKey& key) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second.value;
  }

  std::optional<TableEntry> entry(const InvariantKey& key) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const InvariantKey& key) const {
    std::shared_lock lock(mutex_);
    return entries_.count(key) != 0;
  }

  void put(const InvariantKey& key, const Rational& value, Provenance provenance) {
    std::unique_lock lock(mutex_);
    auto [it, inserted] = entries_.try_emplace(key, TableEntry{value, provenance});
    if (!inserted && it->second.value != value) throw ConflictError(key, it->second.value, value);
  }

  /// Replaces a value without conflict checking. Meant for tests that corrupt tables.
  void overwrite(const InvariantKey& key, const Rational& value, Provenance provenance) {
    std::unique_lock lock(mutex_);
    entries_[key] = TableEntry{value, provenance};
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
  }

  void clear() {
    std::unique_lock lock(mutex_);
    entries_.clear();
  }

  /// Snapshot in canonical key order.
  std::map<InvariantKey, TableEntry> entries() const {
    std::shared_lock lock(mutex_);
    return entries_;
  }

  void merge(const InvariantTable& other) {
    for (const auto& [k, e] : other.entries()) put(k, e.value, e.provenance);
  }

  friend bool operator==(const InvariantTable& a, const InvariantTable& b) {
    return a.target_ == b.target_ && a.seed_sign_ == b.seed_sign_ && a.entries() == b.entries();
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["schema"] = cache_schema_version;
    j["target"] = gwcalc::to_json(target_);
    j["seed_sign"] = seed_sign_ > 0 ? "+1" : "-1";
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [k, e] : this->entries()) {
      nlohmann::json ins = nlohmann::json::array();
      for (const auto& b : k.insertions) ins.push_back({{"a", b.a}, {"basis", b.basis}});
      entries.push_back({{"kind", kind_name(k.kind)},
                         {"genus", k.genus},
                         {"degree", k.degree},
                         {"insertions", std::move(ins)},
                         {"value", to_fraction_string(e.value)},
                         {"provenance", provenance_name(e.provenance)}});
    }
    j["entries"] = std::move(entries);
    return j;
  }

  static InvariantTable from_json(const nlohmann::json& j) {
    try {
      const int schema = j.at("schema").get<int>();
      if (schema != cache_schema_version) throw Error("unsupported cache schema version " + std::to_string(schema));
      const std::string sign = j.at("seed_sign").get<std::string>();
      if (sign != "+1" && sign != "-1") throw Error("malformed seed_sign: " + sign);
      InvariantTable table(target_from_json(j.at("target")), sign == "+1" ? 1 : -1);
      for (const auto& e : j.at("entries")) {
        InvariantKey k{parse_kind(e.at("kind").get<std::string>()), e.at("genus").get<int>(),
                       e.at("degree").get<int>(), {}};
        for (const auto& b : e.at("insertions")) k.insertions.push_back({b.at("a").get<int>(), b.at("basis").get<int>()});
        table.put(k, parse_rational(e.at("value").get<std::string>()),
                  parse_provenance(e.at("provenance").get<std::string>()));
      }
      return table;
    } catch (const nlohmann::json::exception& e) {
      throw Error(std::string("malformed cache file: ") + e.what());
    }
  }

  /// Writes to a temporary file beside path, then renames over it.
  void save(const std::filesystem::path& path) const {
    const std::string text = to_json().dump(1) + "\n";
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write " + tmp.string());
      out << text;
      out.flush();
      if (!out) throw Error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
      std::filesystem::remove(tmp);
      throw Error("cannot rename cache into place: " + ec.message());
    }
  }

  static InvariantTable load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error("malformed cache file " + path.string() + ": " + e.what());
    }
    return from_json(j);
  }

  /// load() plus a check that the file was written for the given target.
  static InvariantTable load(const std::filesystem::path& path, const TargetSpace& expected) {
    InvariantTable table = load(path);
    if (!(table.target() == expected))
      throw Error("cache " + path.string() + " belongs to target " + table.target().name() + ", not " +
                  expected.name());
    return table;
  }

 private:
  TargetSpace target_;
  int seed_sign_;
  mutable std::shared_mutex mutex_;
  std::map<InvariantKey, TableEntry> entries_;
};

/// "a:basis" pairs joined by ';', e.g. "0:2;1:1".
inline std::string insertions_csv(const InvariantKey& k) {
  std::string out;
  for (std::size_t i = 0; i < k.insertions.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(k.insertions[i].a) + ":" + std::to_string(k.insertions[i].basis);
  }
  return out;
}

inline std::string csv_row(const InvariantKey& k, const Rational& value) {
  return kind_name(k.kind) + "," + std::to_string(k.genus) + "," + std::to_string(k.degree) + "," +
         insertions_csv(k) + "," + to_display_string(value) + "\n";
}

/// Basis index named by "1", "h", "h^k", "pt" (projective targets) or "e<k>".
inline int parse_class_name(const TargetSpace& t, const std::string& s) {
  auto number = [&](const std::string& digits) {
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw Error("unknown class: " + s);
    return std::stoi(digits);
  };
  int idx = -1;
  if (s.size() > 1 && s[0] == 'e') {
    idx = number(s.substr(1));
  } else if (t.is_projective()) {
    if (s == "1") idx = 0;
    else if (s == "h") idx = 1;
    else if (s == "pt") idx = static_cast<int>(t.point_index());
    else if (s.rfind("h^", 0) == 0) idx = number(s.substr(2));
  }
  if (idx < 0 || idx >= static_cast<int>(t.rank())) throw Error("unknown class: " + s);
  return idx;
}

/// Insertions such as "pt,tau1(h),h^2" (commas or spaces separate them).
inline std::vector<BasisInsertion> parse_insertions(const TargetSpace& t, const std::string& text) {
  std::vector<BasisInsertion> out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    BasisInsertion b;
    if (token.rfind("tau", 0) == 0) {
      const auto open = token.find('(');
      if (open == std::string::npos || token.back() != ')') throw Error("malformed insertion: " + token);
      const std::string a = token.substr(3, open - 3);
      if (a.empty() || a.find_first_not_of("0123456789") != std::string::npos)
        throw Error("malformed insertion: " + token);
      b.a = std::stoi(a);
      b.basis = parse_class_name(t, token.substr(open + 1, token.size() - open - 2));
    } else {
      b.basis = parse_class_name(t, token);
    }
    out.push_back(b);
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ' ') flush();
    else token += c;
  }
  flush();
  return out;
}

inline std::string table_to_csv(const InvariantTable& table) {
  std::string out = "kind,genus,degree,insertions,value\n";
  for (const auto& [k, e] : table.entries()) out += csv_row(k, e.value);
  return out;
}

}  // namespace gwcalc
