#include <doctest.h>

#include "core/interpretation.hpp"
#include "helpers.hpp"

using namespace predimlab;
using pdt::al;
using pdt::mk;

namespace {

RationalFixture fx1() { return RationalFixture::standard(al("1")); }

std::vector<std::vector<std::string>> sorted_family(
    std::vector<std::vector<std::string>> fam) {
  for (auto& m : fam) std::sort(m.begin(), m.end());
  std::sort(fam.begin(), fam.end());
  return fam;
}

}  // namespace

TEST_CASE("standard fixture matches the documented shapes") {
  RationalFixture fx = fx1();
  CHECK(fx.bgadget.size() == 3);
  CHECK(fx.bgadget.triple_count() == 1);
  CHECK(fx.cgadget.size() == 4);
  CHECK(fx.cgadget.triple_count() == 2);
  fx.validate();

  // a fixture exists away from alpha = 1 too
  RationalFixture half = RationalFixture::standard(al("1/2"));
  half.validate();
}

TEST_CASE("coding round trips") {
  RationalFixture fx = fx1();
  Alpha one = fx.alpha;
  FinStructure frag = mk({"s1", "s2", "s3"});

  auto code = build_code(one, frag, {"s1", "s2", "s3"}, 1, {{"s1"}, {"s3"}});
  auto dec = decode(one, code.fragment, code.code_vertex, 1);
  CHECK(dec.code_vertex_known);
  CHECK(sorted_family(dec.family) ==
        sorted_family({{std::vector<std::string>{"s1"}},
                       {std::vector<std::string>{"s3"}}}));

  // empty family: the code vertex decodes nothing, flagged
  auto empty = build_code(one, frag, {"s1", "s2", "s3"}, 1, {});
  auto dec0 = decode(one, empty.fragment, empty.code_vertex, 1);
  CHECK_FALSE(dec0.code_vertex_known);
  CHECK(dec0.family.empty());

  // k = 2, one pair; verified against the emitted FO formula as well
  auto pair = build_code(one, frag, {"s1", "s2", "s3"}, 2, {{"s1", "s2"}});
  auto dec2 = decode(one, pair.fragment, pair.code_vertex, 2);
  CHECK(sorted_family(dec2.family) ==
        sorted_family({{std::vector<std::string>{"s1", "s2"}}}));
  auto rho = coding_formula(one, 2, {"y1", "y2"}, "vc");
  const FinStructure& m = pair.fragment;
  Assignment good{{"y1", m.index_of("s1")},
                  {"y2", m.index_of("s2")},
                  {"vc", m.index_of(pair.code_vertex)}};
  Assignment bad{{"y1", m.index_of("s1")},
                 {"y2", m.index_of("s3")},
                 {"vc", m.index_of(pair.code_vertex)}};
  CHECK(eval_fo(m, rho, good));
  CHECK_FALSE(eval_fo(m, rho, bad));
}

TEST_CASE("codes over disjoint supports do not interfere") {
  RationalFixture fx = fx1();
  Alpha one = fx.alpha;
  FinStructure frag = mk({"s1", "s2", "t1", "t2"});
  auto c1 = build_code(one, frag, {"s1", "s2"}, 1, {{"s1"}});
  auto c2 = build_code(one, c1.fragment, {"t1", "t2"}, 1, {{"t2"}});
  auto d1 = decode(one, c2.fragment, c1.code_vertex, 1);
  auto d2 = decode(one, c2.fragment, c2.code_vertex, 1);
  CHECK(sorted_family(d1.family) ==
        sorted_family({{std::vector<std::string>{"s1"}}}));
  CHECK(sorted_family(d2.family) ==
        sorted_family({{std::vector<std::string>{"t2"}}}));
}

TEST_CASE("set operations") {
  RationalFixture fx = fx1();
  Alpha one = fx.alpha;
  FinStructure frag = mk({"s1", "s2", "s3", "t1", "t2", "t3"});
  auto cs = build_code(one, frag, {"s1", "s2", "s3"}, 1, {{"s1"}, {"s2"}});
  auto ct = build_code(one, cs.fragment, {"t1", "t2", "t3"}, 1,
                       {{"t1"}, {"t2"}, {"t3"}});
  FinStructure work = ct.fragment;

  // union within the same support
  auto cs2 = build_code(one, work, {"s1", "s2", "s3"}, 1, {{"s3"}});
  auto u = setop_union(one, cs2.fragment, 1, cs.code_vertex, cs2.code_vertex);
  auto du = decode(one, u.fragment, u.code_vertex, 1);
  CHECK(du.family.size() == 3);

  // product: |X1| = 2, |X2| = 3 gives 6 pairs
  auto p = setop_product(one, work, 1, cs.code_vertex, ct.code_vertex);
  auto dp = decode(one, p.fragment, p.code_vertex, 2);
  CHECK(dp.family.size() == 6);

  // injection / bijection by exact cardinality
  CHECK(setop_injection(one, work, 1, cs.code_vertex, ct.code_vertex));
  CHECK_FALSE(setop_injection(one, work, 1, ct.code_vertex, cs.code_vertex));
  CHECK_FALSE(setop_bijection(one, work, 1, cs.code_vertex, ct.code_vertex));

  // product requires disjoint supports
  auto overlap = build_code(one, work, {"s1", "s2", "s3"}, 1, {{"s2"}});
  CHECK_THROWS_AS(setop_product(one, overlap.fragment, 1, cs.code_vertex,
                                overlap.code_vertex),
                  Error);
}

TEST_CASE("rational representations round trip") {
  RationalFixture fx = fx1();
  for (auto [p, q] : std::vector<std::pair<long long, long long>>{
           {0, 1}, {2, 1}, {3, 2}}) {
    RepResult r = build_rational_rep(fx, p, q);
    auto counts = read_rational(fx, r.fragment, r.abar);
    CHECK(counts.first == p);
    CHECK(counts.second == q);
    CHECK(in_class(fx.alpha, r.fragment, Variant::Strict));
  }
  CHECK_THROWS_AS(build_rational_rep(fx, 1, 0), Error);
}

TEST_CASE("arithmetic relations agree with exact rationals") {
  RationalFixture fx = fx1();
  auto two_frag = [&](long long p1, long long q1, long long p2, long long q2) {
    RepResult r1 = build_rational_rep(fx, p1, q1);
    RepResult r2 = build_rational_rep(fx, p2, q2);
    std::map<std::string, std::string> ren1, ren2;
    for (const auto& nm : r1.fragment.vertex_names()) ren1[nm] = "L" + nm;
    for (const auto& nm : r2.fragment.vertex_names()) ren2[nm] = "R" + nm;
    std::vector<std::string> names;
    std::vector<std::array<std::string, 3>> ts;
    auto add = [&](const FinStructure& f,
                   std::map<std::string, std::string>& ren) {
      for (const auto& nm : f.vertex_names()) names.push_back(ren[nm]);
      for (const auto& t : f.triples())
        ts.push_back({ren[f.name(t.v[0])], ren[f.name(t.v[1])],
                      ren[f.name(t.v[2])]});
    };
    add(r1.fragment, ren1);
    add(r2.fragment, ren2);
    FinStructure frag(names, ts);
    std::vector<std::string> a1, a2;
    for (const auto& nm : r1.abar) a1.push_back("L" + nm);
    for (const auto& nm : r2.abar) a2.push_back("R" + nm);
    return std::make_tuple(frag, a1, a2);
  };

  {
    auto [frag, a1, a2] = two_frag(1, 2, 2, 4);
    CHECK(eval_equiv(fx, frag, a1, a2));
    CHECK(eval_equiv(fx, frag, a1, a1));  // reflexive
  }
  {
    auto [frag, a1, a2] = two_frag(1, 2, 2, 3);
    CHECK_FALSE(eval_equiv(fx, frag, a1, a2));
    CHECK(eval_order(fx, frag, a1, a2));   // 1/2 < 2/3
    CHECK_FALSE(eval_order(fx, frag, a2, a1));
    CHECK_FALSE(eval_order(fx, frag, a1, a1));  // irreflexive
  }
}

TEST_CASE("multiplication and addition by cross-multiplication") {
  RationalFixture fx = fx1();
  auto frag3 = [&](long long p1, long long q1, long long p2, long long q2,
                   long long p3, long long q3) {
    std::vector<std::pair<long long, long long>> reps{{p1, q1}, {p2, q2}, {p3, q3}};
    std::vector<std::string> names;
    std::vector<std::array<std::string, 3>> ts;
    std::vector<std::vector<std::string>> abars;
    for (size_t i = 0; i < reps.size(); ++i) {
      RepResult r = build_rational_rep(fx, reps[i].first, reps[i].second);
      std::string pre = "t" + std::to_string(i) + "_";
      for (const auto& nm : r.fragment.vertex_names()) names.push_back(pre + nm);
      for (const auto& t : r.fragment.triples())
        ts.push_back({pre + r.fragment.name(t.v[0]), pre + r.fragment.name(t.v[1]),
                      pre + r.fragment.name(t.v[2])});
      std::vector<std::string> ab;
      for (const auto& nm : r.abar) ab.push_back(pre + nm);
      abars.push_back(ab);
    }
    return std::make_pair(FinStructure(names, ts), abars);
  };

  {
    auto [frag, t] = frag3(1, 2, 2, 3, 2, 6);
    CHECK(eval_mul(fx, frag, t[0], t[1], t[2]));
  }
  {
    auto [frag, t] = frag3(1, 2, 2, 3, 1, 3);
    CHECK(eval_mul(fx, frag, t[0], t[1], t[2]));  // E-equivalent target
  }
  {
    auto [frag, t] = frag3(1, 2, 1, 3, 5, 6);
    CHECK(eval_add(fx, frag, t[0], t[1], t[2]));
  }
  {
    // x + 0 is x up to E
    auto [frag, t] = frag3(2, 3, 0, 1, 2, 3);
    CHECK(eval_add(fx, frag, t[0], t[1], t[2]));
    auto [frag2, t2] = frag3(2, 3, 0, 1, 1, 3);
    CHECK_FALSE(eval_add(fx, frag2, t2[0], t2[1], t2[2]));
  }
}

TEST_CASE("formula-level evaluation agrees with the semantic one") {
  RationalFixture fx = fx1();
  auto mk2 = [&](long long p1, long long q1, long long p2, long long q2) {
    std::vector<std::pair<long long, long long>> reps{{p1, q1}, {p2, q2}};
    std::vector<std::string> names;
    std::vector<std::array<std::string, 3>> ts;
    std::vector<std::vector<std::string>> abars;
    for (size_t i = 0; i < reps.size(); ++i) {
      RepResult r = build_rational_rep(fx, reps[i].first, reps[i].second);
      std::string pre = "t" + std::to_string(i) + "_";
      for (const auto& nm : r.fragment.vertex_names()) names.push_back(pre + nm);
      for (const auto& t : r.fragment.triples())
        ts.push_back({pre + r.fragment.name(t.v[0]), pre + r.fragment.name(t.v[1]),
                      pre + r.fragment.name(t.v[2])});
      std::vector<std::string> ab;
      for (const auto& nm : r.abar) ab.push_back(pre + nm);
      abars.push_back(ab);
    }
    return std::make_pair(FinStructure(names, ts), abars);
  };
  for (auto [p1, q1, p2, q2] :
       std::vector<std::array<long long, 4>>{{1, 1, 1, 1},
                                             {1, 2, 2, 1},
                                             {2, 2, 1, 1},
                                             {1, 2, 2, 3}}) {
    auto [frag, t] = mk2(p1, q1, p2, q2);
    CHECK(eval_relation_formula(fx, "E", frag, {t[0], t[1]}) ==
          eval_equiv(fx, frag, t[0], t[1]));
    CHECK(eval_relation_formula(fx, "O", frag, {t[0], t[1]}) ==
          eval_order(fx, frag, t[0], t[1]));
  }
}

TEST_CASE("emitted formula shapes follow the displays") {
  RationalFixture fx = fx1();
  auto e = emit_formula(fx, "E");
  CHECK(e.count_ops("pi1") == 2);
  CHECK(e.count_ops("theta2") == 1);
  auto o = emit_formula(fx, "O");
  CHECK(o.count_ops("pi1") == 2);
  CHECK(o.count_ops("eta2") == 1);
  CHECK(o.count_ops("theta2") == 0);
  auto ad = emit_formula(fx, "A");
  CHECK(ad.count_ops("pi1") == 3);
  CHECK(ad.count_ops("upsilon2") == 1);
  CHECK(ad.count_ops("theta2") == 2);
}

TEST_CASE("density demos") {
  RationalFixture fx = fx1();
  auto demo = fmp_density_demo(fx, Rat(1, 2), Rat(2, 3));
  REQUIRE(demo.values.size() == 3);
  CHECK(demo.values[1] == Rat(3, 5));
  CHECK(eval_order(fx, demo.fragment, demo.tuples[0], demo.tuples[1]));
  CHECK(eval_order(fx, demo.fragment, demo.tuples[1], demo.tuples[2]));

  auto farey = fmp_density_demo(fx, Rat(0), Rat(1));
  CHECK(farey.values[1] == Rat(1, 2));

  auto chain4 = density_chain(fx, Rat(1, 2), Rat(2, 3), 4);
  CHECK(chain4.values.size() == 4);
  for (size_t i = 0; i + 1 < chain4.values.size(); ++i)
    CHECK(eval_order(fx, chain4.fragment, chain4.tuples[i], chain4.tuples[i + 1]));
}
