#include "fixtures.hpp"

#include <gwcalc/invariant_store.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace gwcalc;

namespace {

InvariantKey ckey(int d, std::vector<BasisInsertion> ins) { return InvariantKey{Kind::complex, 0, d, std::move(ins)}; }

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "gwcalc_store_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Normalize, SortsEvenInsertions) {
  const auto p2 = projective_space(2);
  const auto terms = normalize(p2, Kind::complex, 0, 1, std::vector<BasisInsertion>{{0, 2}, {0, 1}});
  ASSERT_EQ(terms.size(), 1u);
  EXPECT_EQ(terms[0].coeff, 1);
  EXPECT_EQ(terms[0].key, ckey(1, {{0, 1}, {0, 2}}));
}

TEST(Normalize, SplitsMixedClass) {
  const auto p2 = projective_space(2);
  const std::vector<Insertion> raw{{0, p2.basis_class(1) + p2.basis_class(2)}};
  const auto terms = normalize(p2, Kind::complex, 0, 1, raw);
  ASSERT_EQ(terms.size(), 2u);
  EXPECT_EQ(terms[0].coeff, 1);
  EXPECT_EQ(terms[1].coeff, 1);
  EXPECT_EQ(terms[0].key, ckey(1, {{0, 1}}));
  EXPECT_EQ(terms[1].key, ckey(1, {{0, 2}}));
}

TEST(Normalize, OddSwapFlipsSign) {
  const auto t = fixtures::exterior_ring(2);
  const auto terms = normalize(t, Kind::complex, 0, 0, std::vector<BasisInsertion>{{0, 2}, {0, 1}});
  ASSERT_EQ(terms.size(), 1u);
  EXPECT_EQ(terms[0].coeff, -1);
  EXPECT_EQ(terms[0].key, ckey(0, {{0, 1}, {0, 2}}));
  EXPECT_TRUE(normalize(t, Kind::complex, 0, 0, std::vector<BasisInsertion>{{0, 1}, {0, 1}}).empty());
}

TEST(Normalize, RealParityKillsWrongEigenspace) {
  const auto t = make_projective(2, Involution::tau);
  // tau0 needs H_-, tau1 needs H_+.
  EXPECT_TRUE(normalize(t, Kind::real, 0, 1, std::vector<BasisInsertion>{{0, 2}}).empty());
  EXPECT_TRUE(normalize(t, Kind::real, 0, 1, std::vector<BasisInsertion>{{1, 3}}).empty());
  EXPECT_EQ(normalize(t, Kind::real, 0, 1, std::vector<BasisInsertion>{{0, 3}}).size(), 1u);
  EXPECT_EQ(normalize(t, Kind::real, 0, 1, std::vector<BasisInsertion>{{1, 2}}).size(), 1u);
  const std::vector<Insertion> mixed{{0, t.basis_class(1) + t.basis_class(2)}};
  const auto terms = normalize(t, Kind::real, 0, 1, mixed);
  ASSERT_EQ(terms.size(), 1u);
  EXPECT_EQ(terms[0].key.insertions[0].basis, 1);
}

TEST(Normalize, Idempotent) {
  std::mt19937 rng(5);
  const auto t = fixtures::exterior_ring(4);
  std::uniform_int_distribution<int> basis(0, static_cast<int>(t.rank()) - 1), a(0, 2), len(1, 6);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<BasisInsertion> ins(static_cast<std::size_t>(len(rng)));
    for (auto& b : ins) b = {a(rng), basis(rng)};
    for (const auto& term : normalize(t, Kind::complex, 0, 0, ins)) {
      const auto again = normalize(t, Kind::complex, 0, 0, term.key.insertions);
      ASSERT_EQ(again.size(), 1u);
      EXPECT_EQ(again[0].coeff, 1);
      EXPECT_EQ(again[0].key, term.key);
    }
  }
}

TEST(Normalize, PermutationCovariance) {
  std::mt19937 rng(9);
  const auto t = fixtures::exterior_ring(4);
  std::uniform_int_distribution<int> basis(0, static_cast<int>(t.rank()) - 1), a(0, 2), len(1, 7);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = len(rng);
    std::vector<BasisInsertion> ins(static_cast<std::size_t>(n));
    std::vector<int> degs;
    for (auto& b : ins) {
      b = {a(rng), basis(rng)};
      degs.push_back(t.degree(static_cast<std::size_t>(b.basis)));
    }
    const auto perm = fixtures::random_permutation(rng, n);
    std::vector<BasisInsertion> moved(ins.size());
    for (int i = 0; i < n; ++i)
      moved[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)] - 1)] = ins[static_cast<std::size_t>(i)];
    const auto x = normalize(t, Kind::complex, 0, 0, ins);
    const auto y = normalize(t, Kind::complex, 0, 0, moved);
    ASSERT_EQ(x.size(), y.size());
    if (x.empty()) continue;
    EXPECT_EQ(x[0].key, y[0].key);
    EXPECT_EQ(y[0].coeff, koszul_sign_permutation(perm, degs) * x[0].coeff);
  }
}

TEST(Table, PutGetConflict) {
  InvariantTable table(projective_space(2));
  const auto k = ckey(3, std::vector<BasisInsertion>(8, {0, 2}));
  EXPECT_FALSE(table.get(k));
  table.put(k, 12, Provenance::wdvv);
  EXPECT_EQ(*table.get(k), 12);
  table.put(k, 12, Provenance::wdvv);
  EXPECT_THROW(table.put(k, 13, Provenance::wdvv), ConflictError);
  EXPECT_EQ(*table.get(k), 12);
  table.overwrite(k, 13, Provenance::wdvv);
  EXPECT_EQ(*table.get(k), 13);
}

TEST(Table, SaveLoadRoundTrip) {
  InvariantTable table(make_projective(2, Involution::tau), -1);
  table.put(ckey(1, {{0, 3}, {0, 3}}), 1, Provenance::seed);
  table.put(InvariantKey{Kind::real, 0, 1, {{0, 3}}}, -1, Provenance::seed);
  table.put(ckey(2, {{0, 2}, {0, 3}, {0, 3}}), make_rational(-5, 7), Provenance::axiom_reduction);
  const auto path = temp_file("round_trip.json");
  table.save(path);
  EXPECT_EQ(InvariantTable::load(path), table);
  EXPECT_EQ(InvariantTable::load(path, make_projective(2, Involution::tau)), table);
  const auto j = table.to_json();
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["seed_sign"], "-1");
  EXPECT_EQ(j["entries"][0]["value"], "1/1");
  int found = 0;
  for (const auto& entry : j["entries"])
    if (entry["provenance"] == "axiom-reduction") {
      EXPECT_EQ(entry["value"], "-5/7");
      ++found;
    }
  EXPECT_EQ(found, 1);
  for (const auto& entry : std::filesystem::directory_iterator(path.parent_path()))
    EXPECT_EQ(entry.path().string().find(".tmp."), std::string::npos);
}

TEST(Table, LoadErrors) {
  InvariantTable table(projective_space(3));
  table.put(ckey(1, {{0, 3}, {0, 3}}), 1, Provenance::seed);
  const auto path = temp_file("p3.json");
  table.save(path);
  EXPECT_THROW(InvariantTable::load(path, projective_space(5)), Error);
  auto j = table.to_json();
  j["schema"] = 2;
  const auto bad = temp_file("schema2.json");
  std::ofstream(bad) << j.dump();
  try {
    InvariantTable::load(bad);
    FAIL() << "schema 2 accepted";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("schema"), std::string::npos);
  }
  const auto garbage = temp_file("garbage.json");
  std::ofstream(garbage) << "{ not json";
  EXPECT_THROW(InvariantTable::load(garbage), Error);
  EXPECT_THROW(InvariantTable::load(temp_file("missing.json")), Error);
}

TEST(Table, Csv) {
  InvariantTable table(projective_space(2));
  table.put(ckey(1, {{0, 2}, {0, 2}}), 1, Provenance::seed);
  table.put(ckey(1, {{1, 1}, {0, 2}}), make_rational(1, 2), Provenance::trr);
  EXPECT_EQ(table_to_csv(table),
            "kind,genus,degree,insertions,value\n"
            "complex,0,1,0:2;0:2,1\n"
            "complex,0,1,1:1;0:2,1/2\n");
}

TEST(Table, Deterministic) {
  std::mt19937 rng(1);
  std::vector<InvariantKey> keys;
  for (int d = 0; d < 20; ++d) keys.push_back(ckey(d, {{0, d % 3}}));
  InvariantTable a(projective_space(2)), b(projective_space(2));
  for (const auto& k : keys) a.put(k, k.degree, Provenance::wdvv);
  std::shuffle(keys.begin(), keys.end(), rng);
  for (const auto& k : keys) b.put(k, k.degree, Provenance::wdvv);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
}

TEST(Parse, Insertions) {
  const auto p3 = projective_space(3);
  EXPECT_EQ(parse_insertions(p3, "pt,tau1(h), h^2 1 e2"),
            (std::vector<BasisInsertion>{{0, 3}, {1, 1}, {0, 2}, {0, 0}, {0, 2}}));
  EXPECT_THROW(parse_insertions(p3, "h^4"), Error);
  EXPECT_THROW(parse_insertions(p3, "tau(h)"), Error);
  EXPECT_THROW(parse_insertions(p3, "x"), Error);
  const auto t = fixtures::exterior_ring(2);
  EXPECT_EQ(parse_insertions(t, "e3"), (std::vector<BasisInsertion>{{0, 3}}));
  EXPECT_THROW(parse_insertions(t, "pt"), Error);
}
