#include <gwcalc/real_solver.hpp>
#include <gwcalc/verify.hpp>

#include <gtest/gtest.h>

using namespace gwcalc;

namespace {

InvariantKey rkey(int d, std::vector<BasisInsertion> ins) {
  std::sort(ins.begin(), ins.end());
  return InvariantKey{Kind::real, 0, d, std::move(ins)};
}

InvariantKey rpoints(int d, int count, int pt) {
  return rkey(d, std::vector<BasisInsertion>(static_cast<std::size_t>(count), BasisInsertion{0, pt}));
}

const TargetSpace& p3tau() {
  static const TargetSpace t = make_projective(2, Involution::tau);
  return t;
}

}  // namespace

TEST(RealVdim, Examples) {
  EXPECT_EQ(vdim_real(0, 1, 1, p3tau()), 6);
  for (int d = 1; d <= 5; ++d) EXPECT_EQ(vdim_real(0, d, d, p3tau()), 6 * d);
  EXPECT_EQ(vdim_real(0, 0, 0, make_projective(3, Involution::tau)), 2);
}

TEST(RealFilter, Examples) {
  const auto& t = p3tau();
  EXPECT_EQ(filter_real(t, rkey(1, {{0, 2}, {0, 3}})), ZeroReason::parity);
  EXPECT_EQ(filter_real(t, rkey(1, {{1, 3}})), ZeroReason::parity);
  EXPECT_EQ(filter_real(t, rpoints(1, 2, 3)), ZeroReason::grading);
  EXPECT_EQ(filter_real(t, rpoints(1, 1, 3)), std::nullopt);
  EXPECT_EQ(filter_real(t, rkey(0, {{0, 3}})), ZeroReason::effectivity);
  EXPECT_EQ(filter_real(t, rkey(-1, {{0, 3}})), ZeroReason::effectivity);
}

TEST(RealDegreeMap, Examples) {
  EXPECT_EQ(real_degree_map(1, p3tau()), 2);
  EXPECT_EQ(real_degree_map(0, p3tau()), 0);
  EXPECT_EQ(real_degree_map(3, p3tau()), 6);
}

TEST(RealMappingToPoint, AlwaysZero) {
  EXPECT_EQ(real_mapping_to_point(p3tau(), rkey(0, {{0, 1}, {0, 3}})), 0);
  EXPECT_EQ(real_mapping_to_point(make_projective(2, Involution::eta), rkey(0, {{0, 1}, {0, 1}, {0, 3}})), 0);
  EXPECT_THROW(real_mapping_to_point(p3tau(), rpoints(1, 1, 3)), Error);
}

TEST(RealAxioms, Examples) {
  const auto& t = p3tau();
  auto f = reduce_real_axioms(t, rkey(1, {{0, 3}, {0, 0}}));
  ASSERT_TRUE(f);
  EXPECT_EQ(*f, KeyForm());
  f = reduce_real_axioms(t, rkey(1, {{0, 3}, {1, 0}}));
  ASSERT_TRUE(f);
  EXPECT_EQ(*f, KeyForm());
  f = reduce_real_axioms(t, rkey(1, {{0, 3}, {0, 1}}));
  ASSERT_TRUE(f);
  EXPECT_EQ(*f, KeyForm::variable(rpoints(1, 1, 3)));
  // tau1(h^2) with a divisor: d * rest + 2 <tau0(h^3), pt>.
  f = reduce_real_axioms(t, rkey(2, {{0, 1}, {1, 2}, {0, 3}}));
  ASSERT_TRUE(f);
  KeyForm expect = KeyForm::variable(rkey(2, {{1, 2}, {0, 3}}), 2);
  expect.add(KeyForm::variable(rpoints(2, 2, 3), 2));
  EXPECT_EQ(*f, expect);
  EXPECT_FALSE(reduce_real_axioms(t, rpoints(1, 1, 3)));
}

TEST(RealSolve, P3Counts) {
  const auto table = solve_primary_real(p3tau(), 5, 1);
  const std::vector<long> expected{1, 0, -1, 0, 5};
  for (int d = 1; d <= 5; ++d) EXPECT_EQ(*table.get(rpoints(d, d, 3)), expected[static_cast<std::size_t>(d - 1)]) << d;
  // Real conics lie in a plane; two general conjugate pairs do not.
  EXPECT_EQ(*table.get(rpoints(2, 2, 3)), 0);
}

TEST(RealSolve, SeedAntisymmetry) {
  for (const auto& t : {p3tau(), make_projective(3, Involution::tau)}) {
    const auto plus = solve_primary_real(t, 3, 1);
    const auto minus = solve_primary_real(t, 3, -1);
    EXPECT_EQ(*minus.get(rpoints(1, 1, static_cast<int>(t.point_index()))), -1);
    ASSERT_EQ(plus.size(), minus.size());
    for (const auto& [k, e] : plus.entries()) {
      const Rational expect = k.kind == Kind::real ? Rational(-e.value) : e.value;
      EXPECT_EQ(*minus.get(k), expect) << to_string(k);
    }
  }
}

TEST(RealSolve, IntegralityAndGrading) {
  for (const auto& t : {p3tau(), make_projective(3, Involution::tau)}) {
    const auto table = solve_primary_real(t, 4, 1);
    for (const auto& [k, e] : table.entries()) {
      if (k.kind != Kind::real) continue;
      bool points = true;
      for (const auto& i : k.insertions) points = points && i.basis == static_cast<int>(t.point_index());
      if (points) EXPECT_TRUE(is_integer(e.value)) << to_string(k);
      if (e.value != 0) EXPECT_FALSE(filter_real(t, k)) << to_string(k);
    }
    VerifyOptions vo;
    vo.max_degree = 4;
    const auto r = verify_rwdvv(table, vo);
    EXPECT_TRUE(r.passed) << r.counterexample;
    EXPECT_GT(r.checked, 0u);
  }
}

TEST(RealSolve, RelationDetectsCorruption) {
  auto table = solve_primary_real(p3tau(), 3, 1);
  table.overwrite(rpoints(3, 3, 3), 7, Provenance::rwdvv);
  VerifyOptions vo;
  vo.max_degree = 3;
  const auto r = verify_rwdvv(table, vo);
  EXPECT_FALSE(r.passed);
  EXPECT_NE(r.counterexample.find(to_string(rpoints(3, 3, 3))), std::string::npos) << r.counterexample;
}

TEST(RealSolve, RejectsTargetsWithoutInvolution) {
  EXPECT_THROW(solve_primary_real(projective_space(3), 1), Error);
  EXPECT_THROW(solve_primary_real(projective_space(2), 1), Error);
}

TEST(RealSolve, Eta) {
  const auto t = make_projective(2, Involution::eta);
  const auto table = solve_primary_real(t, 3, 1);
  EXPECT_EQ(*table.get(rpoints(1, 1, 3)), 1);
  for (const auto& [k, e] : table.entries())
    if (k.kind == Kind::real && k.degree == 0) EXPECT_EQ(e.value, 0);
  EXPECT_THROW(solve_primary_real(t, 1, std::nullopt), UnderdeterminedError);
  try {
    solve_primary_real(t, 1, std::nullopt);
  } catch (const UnderdeterminedError& e) {
    ASSERT_FALSE(e.unresolved().empty());
    EXPECT_EQ(e.unresolved()[0], to_string(rpoints(1, 1, 3)));
  }
}

TEST(Rtrr, HandExamples) {
  const auto& t = p3tau();
  const auto table = solve_primary_real(t, 2, 1);
  ComplexInvariants complex(table);
  RealInvariants inv(table, complex, DescendantMethod::trr_first);
  // d <tau1(h^2)>_1 = -2 <tau0(h^3)>_1 + splittings, and R5 on <tau1(h^2), h>_1
  // gives <tau1(h^2)>_1 + 2 <pt>_1.
  const Rational lone = inv.value(rkey(1, {{1, 2}}));
  RealInvariants ax(table, complex, DescendantMethod::axioms_first);
  EXPECT_EQ(lone, ax.value(rkey(1, {{1, 2}})));
  EXPECT_EQ(inv.value(rkey(1, {{0, 1}, {1, 2}})), lone + 2);
  // String: <tau1(h^2), tau0(1)>_1 vanishes.
  EXPECT_EQ(inv.value(rkey(1, {{0, 0}, {1, 2}})), 0);
}
