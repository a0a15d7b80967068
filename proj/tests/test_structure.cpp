#include <doctest.h>

#include "helpers.hpp"

using namespace predimlab;
using pdt::mk;

TEST_CASE("construction validates triples") {
  CHECK_THROWS_AS(mk({"a", "b"}, {{"a", "b", "b"}}), Error);
  CHECK_THROWS_AS(mk({"a", "b"}, {{"a", "b", "c"}}), Error);
  CHECK_THROWS_AS(mk({"a", "a"}), Error);
  FinStructure s = mk({"b", "a", "c"}, {{"c", "b", "a"}, {"a", "b", "c"}});
  CHECK(s.size() == 3);
  CHECK(s.triple_count() == 1);  // unordered, deduplicated
}

TEST_CASE("json round trip and rejection") {
  FinStructure s = mk({"a", "b", "c", "d"}, {{"a", "b", "c"}, {"b", "c", "d"}});
  auto j = s.to_json();
  CHECK(FinStructure::from_json(j) == s);
  nlohmann::json bad = {{"vertices", {"a", "b"}}, {"triples", {{"a", "a", "b"}}}};
  CHECK_THROWS_AS(FinStructure::from_json(bad), Error);
}

TEST_CASE("substructure: identity, empty, induced") {
  FinStructure m = mk({"a", "b", "c", "d"}, {{"a", "b", "c"}, {"b", "c", "d"}});
  CHECK(m.substructure(m.full_mask()) == m);
  CHECK(m.substructure(Mask{0}).size() == 0);
  FinStructure s = m.substructure(m.mask_of({"a", "b", "c"}));
  CHECK(s.triple_count() == 1);
  CHECK(s.has_triple(s.index_of("a"), s.index_of("b"), s.index_of("c")));
  CHECK_THROWS_AS(m.mask_of({"zz"}), Error);
}

TEST_CASE("free join: definitional union and error paths") {
  FinStructure a = mk({"a", "b"});
  FinStructure b = mk({"a", "b", "x"}, {{"a", "b", "x"}});
  FinStructure c = mk({"a", "b", "y"}, {{"a", "b", "y"}});
  FinStructure d = free_join(b, a, c);
  CHECK(d.size() == 4);
  CHECK(d.triple_count() == 2);
  CHECK(is_free(d, d.mask_of({"a", "b", "x"}), d.mask_of({"a", "b"}),
                d.mask_of({"a", "b", "y"})));

  // joining with the base
  CHECK(free_join(b, a, a) == b);

  // disjoint union over the empty base
  FinStructure e1 = mk({"u"}), e2 = mk({"v"});
  FinStructure du = free_join(e1, mk({}), e2);
  CHECK(du.size() == 2);
  CHECK(du.triple_count() == 0);

  // overlap violation
  FinStructure c2 = mk({"a", "b", "x"}, {});
  CHECK_THROWS_AS(free_join(b, a, c2), Error);
  // base not induced in one side
  FinStructure abase = mk({"a", "b", "x"});
  FinStructure bb = mk({"a", "b", "x", "w"}, {{"a", "b", "x"}});
  CHECK_THROWS_AS(free_join(bb, abase, mk({"a", "b", "x", "u"}, {})), Error);
}

TEST_CASE("is_free detects a single crossing witness") {
  FinStructure d = mk({"a", "x", "y"}, {{"a", "x", "y"}});
  Mask bm = d.mask_of({"a", "x"});
  Mask am = d.mask_of({"a"});
  Mask cm = d.mask_of({"a", "y"});
  CHECK_FALSE(is_free(d, bm, am, cm));
  CHECK(is_free(d, am, am, cm));  // B = A: vacuous
}

TEST_CASE("copy enumeration matches the spec examples") {
  // M = B, base A: exactly the identity copy
  FinStructure b = mk({"a1", "a2", "b"}, {{"a1", "a2", "b"}});
  auto copies = enumerate_copies(b, b, {"a1", "a2"}, {"a1", "a2"});
  CHECK(copies.size() == 1);
  CHECK(copies[0].valid());

  // B = A
  FinStructure a = mk({"a1", "a2"});
  CHECK(enumerate_copies(b, a, {"a1", "a2"}, {"a1", "a2"}).size() == 1);

  // chi_M(A u {b}/A) = 2 with two parallel gadgets
  FinStructure m = mk({"a1", "a2", "b", "bp"},
                      {{"a1", "a2", "b"}, {"a1", "a2", "bp"}});
  CHECK(enumerate_copies(m, b, {"a1", "a2"}, {"a1", "a2"}).size() == 2);
}

TEST_CASE("copy counting agrees with the brute-force oracle") {
  Rng rng(7);
  auto corpus = all_structures_up_to_iso(5, 4);
  int checked = 0;
  for (const auto& m : corpus) {
    if (m.size() < 2) continue;
    if (rng.below(4) != 0) continue;
    for (const auto& ext : corpus) {
      if (ext.size() < 1 || ext.size() > m.size()) continue;
      if (rng.below(8) != 0) continue;
      std::vector<int> anchor(ext.size(), -1);
      anchor[0] = 0;
      CHECK(count_copies(m, ext, anchor) ==
            pdt::oracle_copy_count(m, ext, anchor));
      if (++checked > 200) return;
    }
  }
}

TEST_CASE("isomorphism: identity, relabeling, mismatch") {
  FinStructure a = mk({"a", "b", "c"}, {{"a", "b", "c"}});
  CHECK(isomorphic(a, a).has_value());

  FinStructure b = mk({"x", "y", "z"}, {{"z", "y", "x"}});
  auto map = isomorphic(a, b);
  REQUIRE(map.has_value());
  CHECK(Embedding{a, b, *map}.valid());

  FinStructure c = mk({"x", "y", "z"});
  CHECK_FALSE(isomorphic(a, c).has_value());
}

TEST_CASE("canonical form is a complete isomorphism invariant on a corpus") {
  auto corpus = all_structures_up_to_iso(5, 3);
  std::set<std::string> forms;
  for (const auto& s : corpus) forms.insert(s.canonical_form());
  CHECK(forms.size() == corpus.size());

  // relabeling never changes the form
  Rng rng(11);
  for (const auto& s : corpus) {
    if (rng.below(5) != 0) continue;
    std::vector<std::string> names = s.vertex_names();
    std::vector<std::string> shuffled = names;
    rng.shuffle(shuffled);
    std::map<std::string, std::string> ren;
    for (size_t i = 0; i < names.size(); ++i) ren[names[i]] = "r" + shuffled[i];
    std::vector<std::string> vs;
    for (auto& n : names) vs.push_back(ren[n]);
    std::vector<std::array<std::string, 3>> ts;
    for (const auto& t : s.triples())
      ts.push_back({ren[s.name(t.v[0])], ren[s.name(t.v[1])], ren[s.name(t.v[2])]});
    FinStructure r(vs, ts);
    CHECK(r.canonical_form() == s.canonical_form());
    CHECK(isomorphic(s, r).has_value());
  }
}

TEST_CASE("free join is associative when bases nest compatibly") {
  FinStructure a = mk({"a"});
  FinStructure b = mk({"a", "b1"}, {});
  FinStructure c = mk({"a", "c1"}, {});
  FinStructure d = mk({"a", "d1"}, {});
  FinStructure left = free_join(free_join(b, a, c), a, d);
  FinStructure right = free_join(b, a, free_join(c, a, d));
  CHECK(left == right);
  CHECK(isomorphic(left, right).has_value());
}
