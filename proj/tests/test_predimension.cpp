#include <doctest.h>

#include "helpers.hpp"

using namespace predimlab;
using pdt::al;
using pdt::mk;

namespace {

// the -1 extension from the copy-bound discussion: two new vertices carrying
// three triples over a relation-free pair
FinStructure minus_one_extension() {
  return mk({"a1", "a2", "b1", "b2"},
            {{"a1", "b1", "b2"}, {"a2", "b1", "b2"}, {"a1", "a2", "b1"}});
}

}  // namespace

TEST_CASE("delta: empty, fractional, integral") {
  CHECK(delta(al("1/2"), mk({})) == Rat(0));
  CHECK(delta(al("1/2"), mk({"a", "b", "c"}, {{"a", "b", "c"}})) == Rat(5, 2));
  CHECK(delta(al("1"), minus_one_extension()) == Rat(1));
}

TEST_CASE("delta_rel examples") {
  Alpha one = al("1");
  FinStructure b = mk({"a1", "a2", "b"}, {{"a1", "a2", "b"}});
  Mask am = b.mask_of({"a1", "a2"});
  CHECK(delta_rel(one, b, am, am) == Rat(0));
  CHECK(delta_rel(one, b, b.full_mask(), am) == Rat(0));
  FinStructure m1 = minus_one_extension();
  CHECK(delta_rel(one, m1, m1.full_mask(), m1.mask_of({"a1", "a2"})) == Rat(-1));
}

TEST_CASE("is_strong: examples and boundary") {
  Alpha one = al("1");
  FinStructure v = mk({"v"});
  CHECK(is_strong(one, v, 0, v.full_mask(), Variant::Strict));

  FinStructure b = mk({"a1", "a2", "b"}, {{"a1", "a2", "b"}});
  Mask am = b.mask_of({"a1", "a2"});
  CHECK(is_strong(one, b, am, b.full_mask(), Variant::NonStrict));
  CHECK_FALSE(is_strong(one, b, am, b.full_mask(), Variant::Strict));
}

TEST_CASE("strong/intrinsic agree with subset-sweep oracles on random pairs") {
  Rng rng(23);
  auto corpus = all_structures_up_to_iso(6, 5);
  std::vector<Alpha> alphas{al("1"), al("1/2"), al("2/3")};
  int checked = 0;
  for (const auto& m : corpus) {
    if (m.size() < 2 || rng.below(2) != 0) continue;
    Mask full = m.full_mask();
    Mask amask = rng.next() & full;
    Mask bmask = amask | (rng.next() & full);
    const Alpha& a = alphas[rng.below(alphas.size())];
    for (Variant v : {Variant::NonStrict, Variant::Strict}) {
      CHECK(is_strong(a, m, amask, bmask, v) ==
            pdt::oracle_strong(a, m, amask, bmask, v));
      CHECK(is_intrinsic(a, m, amask, bmask, v) ==
            pdt::oracle_intrinsic(a, m, amask, bmask, v));
    }
    if (++checked > 120) break;
  }
  CHECK(checked > 25);
}

TEST_CASE("is_intrinsic spec examples") {
  Alpha one = al("1");
  FinStructure b = mk({"a1", "a2", "b"}, {{"a1", "a2", "b"}});
  Mask am = b.mask_of({"a1", "a2"});
  CHECK(is_intrinsic(one, b, am, b.full_mask(), Variant::Strict));
  CHECK_FALSE(is_intrinsic(one, b, am, b.full_mask(), Variant::NonStrict));

  FinStructure m1 = minus_one_extension();
  CHECK(is_intrinsic(one, m1, m1.mask_of({"a1", "a2"}), m1.full_mask(),
                     Variant::NonStrict));

  CHECK(is_intrinsic(one, b, am, am, Variant::Strict));  // B = A: vacuous
}

TEST_CASE("minimal pairs") {
  Alpha one = al("1");
  FinStructure b = mk({"a1", "a2", "b"}, {{"a1", "a2", "b"}});
  Mask am = b.mask_of({"a1", "a2"});
  CHECK(is_minimal_pair(one, b, am, b.full_mask(), Variant::Strict));

  FinStructure c = mk({"a1", "a2", "c1", "c2"},
                      {{"a1", "c1", "c2"}, {"a2", "c1", "c2"}});
  CHECK(is_minimal_pair(one, c, c.mask_of({"a1", "a2"}), c.full_mask(),
                        Variant::Strict));

  // A <=* B means strongness never fails
  FinStructure f = mk({"a1", "a2", "x"});
  CHECK_FALSE(is_minimal_pair(one, f, f.mask_of({"a1", "a2"}), f.full_mask(),
                              Variant::Strict));
  CHECK_THROWS_AS(is_minimal_pair(one, f, f.full_mask(), f.full_mask(),
                                  Variant::Strict),
                  Error);
}

TEST_CASE("minimal pair chains") {
  Alpha one = al("1");
  // one-step chain
  FinStructure b = mk({"a1", "a2", "b"}, {{"a1", "a2", "b"}});
  auto ch = minimal_pair_chain(one, b, b.mask_of({"a1", "a2"}), b.full_mask(),
                               Variant::Strict);
  CHECK(ch.size() == 2);

  // two stacked gadgets: b over {a1,a2}, then b2 over {a1,b}
  FinStructure two = mk({"a1", "a2", "b", "c"},
                        {{"a1", "a2", "b"}, {"a1", "b", "c"}});
  auto ch2 = minimal_pair_chain(one, two, two.mask_of({"a1", "a2"}),
                                two.full_mask(), Variant::Strict);
  CHECK(ch2.size() == 3);
  for (size_t i = 0; i + 1 < ch2.size(); ++i)
    CHECK(is_minimal_pair(one, two, ch2[i], ch2[i + 1], Variant::Strict));

  // A = B: empty chain (single entry)
  auto ch3 = minimal_pair_chain(one, b, b.full_mask(), b.full_mask(),
                                Variant::Strict);
  CHECK(ch3.size() == 1);
}

TEST_CASE("closure: spec examples") {
  Alpha one = al("1");
  FinStructure m = mk({"a1", "a2", "b", "bp"},
                      {{"a1", "a2", "b"}, {"a1", "a2", "bp"}});
  Mask am = m.mask_of({"a1", "a2"});
  // both zero-gadgets are pulled into the star closure
  CHECK(closure_mask(one, m, am, Variant::Strict) == m.full_mask());
  // the non-strict closure stays put (each step has delta-change 0, not < 0)
  CHECK(closure_mask(one, m, am, Variant::NonStrict) == am);

  // A already strong: closure is A
  FinStructure f = mk({"a1", "a2", "x"});
  CHECK(closure_mask(one, f, f.mask_of({"a1", "a2"}), Variant::Strict) ==
        f.mask_of({"a1", "a2"}));
}

TEST_CASE("bounded closure respects the size bound") {
  Alpha one = al("1");
  // chain of two: b needs 1 new vertex, c needs b first
  FinStructure m = mk({"a1", "a2", "b", "c"},
                      {{"a1", "a2", "b"}, {"a1", "b", "c"}});
  Mask am = m.mask_of({"a1", "a2"});
  CHECK(closure_mask(one, m, am, Variant::Strict, 1) == am);
  CHECK(closure_mask(one, m, am, Variant::Strict, 2) ==
        m.mask_of({"a1", "a2", "b"}));
  CHECK(closure_mask(one, m, am, Variant::Strict, 3) == m.full_mask());
  CHECK(closure_mask(one, m, am, Variant::Strict) == m.full_mask());
}

TEST_CASE("closure equals the exhaustive least strong superset") {
  Rng rng(31);
  auto corpus = all_structures_up_to_iso(6, 5);
  std::vector<Alpha> alphas{al("1"), al("1/2"), al("2/3")};
  int checked = 0;
  for (const auto& m : corpus) {
    if (m.size() < 2 || rng.below(3) != 0) continue;
    Mask amask = rng.next() & m.full_mask();
    const Alpha& a = alphas[rng.below(alphas.size())];
    for (Variant v : {Variant::NonStrict, Variant::Strict}) {
      Mask got = closure_mask(a, m, amask, v);
      Mask want = pdt::oracle_closure(a, m, amask, v);
      CHECK(got == want);
      CHECK(is_strong(a, m, got, m.full_mask(), v));
    }
    if (++checked > 80) break;
  }
  CHECK(checked > 25);
}

TEST_CASE("class membership") {
  Alpha half = al("1/2"), one = al("1");
  CHECK(in_class(half, mk({}), Variant::Strict));
  CHECK(in_class(half, mk({}), Variant::NonStrict));

  // 5 vertices, 9 triples: C*+ iff alpha < 5/9
  std::vector<std::array<std::string, 3>> ts;
  std::vector<std::string> vs{"v0", "v1", "v2", "v3", "v4"};
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j)
      for (int k = j + 1; k < 5; ++k)
        if (!(i == 0 && j == 1 && k == 2)) ts.push_back({vs[i], vs[j], vs[k]});
  FinStructure nine(vs, ts);
  REQUIRE(nine.triple_count() == 9);
  CHECK(in_class(half, nine, Variant::Strict));
  CHECK_FALSE(in_class(al("5/9"), nine, Variant::Strict));
  CHECK(in_class(al("5/9"), nine, Variant::NonStrict));

  // a zero-delta subset separates the two classes at alpha = 1:
  // all four triples on four vertices give delta = 0 exactly
  FinStructure z = mk({"v1", "v2", "v3", "v4", "x"},
                      {{"v1", "v2", "v3"},
                       {"v1", "v2", "v4"},
                       {"v1", "v3", "v4"},
                       {"v2", "v3", "v4"}});
  CHECK(in_class(one, z, Variant::NonStrict));
  CHECK_FALSE(in_class(one, z, Variant::Strict));
}

TEST_CASE("mu bound: classic vs displayed") {
  Alpha one = al("1");
  FinStructure m1 = minus_one_extension();
  Mask am = m1.mask_of({"a1", "a2"});
  auto mu = mu_bound(one, m1, am, m1.full_mask());
  CHECK(mu.classic == Rat(2));
  CHECK(mu.paper_displayed == Rat(2, 3));
  CHECK(mu_eta(one, m1, am, m1.full_mask()) == 1);

  // precondition: relative delta must be negative
  FinStructure b = mk({"a1", "a2", "b"}, {{"a1", "a2", "b"}});
  CHECK_THROWS_AS(mu_bound(one, b, b.mask_of({"a1", "a2"}), b.full_mask()),
                  Error);
}

TEST_CASE("copy bound holds over the small corpus while the displayed bound fails") {
  Alpha one = al("1");
  FinStructure bp = minus_one_extension();
  auto corpus = pdt::small_class_corpus(one, Variant::Strict, 6, 5);
  long long max_chi = 0;
  for (const auto& m : corpus) {
    if (m.size() < bp.size()) continue;
    auto anchors = enumerate_copy_maps(m, bp.substructure(bp.mask_of({"a1", "a2"})),
                                       {-1, -1});
    for (const auto& amap : anchors) {
      std::vector<int> anchor(bp.size(), -1);
      anchor[bp.index_of("a1")] = amap[0];
      anchor[bp.index_of("a2")] = amap[1];
      max_chi = std::max(max_chi, count_copies(m, bp, anchor));
    }
  }
  CHECK(max_chi == 1);            // realizable
  CHECK(Rat(max_chi) < Rat(2));   // classic bound respected
  CHECK_FALSE(Rat(max_chi) < Rat(2, 3));  // displayed bound violated
}

TEST_CASE("submodularity of delta on sampled pairs") {
  Rng rng(41);
  auto corpus = all_structures_up_to_iso(6, 5);
  std::vector<Alpha> alphas{al("1"), al("1/2"), al("2/3")};
  int checked = 0;
  for (const auto& m : corpus) {
    if (m.size() < 2 || rng.below(2) != 0) continue;
    Mask x = rng.next() & m.full_mask();
    Mask y = rng.next() & m.full_mask();
    const Alpha& a = alphas[rng.below(alphas.size())];
    Rat lhs = delta(a, m, x | y);
    Rat rhs = delta(a, m, x) + delta(a, m, y) - delta(a, m, x & y);
    CHECK(lhs <= rhs);
    if (++checked > 150) break;
  }
}

TEST_CASE("sequence spec validation and parsing") {
  auto spec = SequenceSpec::parse("1/2", "1/(n+3)");
  CHECK(spec.term(0) == Rat(5, 6));
  CHECK(spec.term(15) == Rat(5, 9));
  CHECK(spec.term(16) == Rat(21, 38));
  CHECK_THROWS_AS(SequenceSpec::parse("1/2", "1/(n+1)"), Error);  // a_0 > 1
  CHECK_THROWS_AS(SequenceSpec::parse("3/2", "1/(n+3)"), Error);
}

TEST_CASE("stabilization threshold: the 5-vertex/9-triple instance lands at 16") {
  std::vector<std::string> vs{"v0", "v1", "v2", "v3", "v4"};
  std::vector<std::array<std::string, 3>> ts;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j)
      for (int k = j + 1; k < 5; ++k)
        if (!(i == 0 && j == 1 && k == 2)) ts.push_back({vs[i], vs[j], vs[k]});
  FinStructure d(vs, ts);
  auto spec = SequenceSpec::parse("1/2", "1/(n+3)");
  Alpha limit(spec.limit);
  auto res = stabilization_threshold(
      spec, [&](const Alpha& an) { return in_class(an, d, Variant::Strict); },
      [&]() { return in_class(limit, d, Variant::Strict); });
  REQUIRE(res.found);
  CHECK(res.n == 16);
  // tightness: fails right below the threshold
  CHECK_FALSE(in_class(Alpha(spec.term(15)), d, Variant::Strict));

  // property already holding at a_0
  FinStructure v1 = mk({"v"});
  auto res0 = stabilization_threshold(
      spec, [&](const Alpha& an) { return in_class(an, v1, Variant::Strict); },
      [&]() { return true; });
  REQUIRE(res0.found);
  CHECK(res0.n == 0);
}

TEST_CASE("stabilization threshold: closure recomputation cross-check") {
  Alpha half = al("1/2");
  // B: base {a1,a2,a3} plus b carrying two triples: a zero-pair at 1/2
  FinStructure b = mk({"a1", "a2", "a3", "b"},
                      {{"a1", "a2", "b"}, {"a1", "a3", "b"}});
  Mask am = b.mask_of({"a1", "a2", "a3"});
  auto spec = SequenceSpec::parse("1/2", "1/(n+3)");
  // at the limit, b is pulled into the star closure; above it, the extension
  // is delta-positive and the closure stays at A
  Mask cl_limit = closure_mask(half, b, am, Variant::Strict);
  CHECK(cl_limit == b.full_mask());
  auto res = stabilization_threshold(
      spec,
      [&](const Alpha& an) {
        return closure_mask(an, b, am, Variant::Strict) == cl_limit;
      },
      [&]() { return true; }, 64, 8);
  // delta-change of b at a_n: 1 - 2*a_n < 0 iff a_n > 1/2: true for every n,
  // so the closure agrees at every term and the threshold is 0
  REQUIRE(res.found);
  CHECK(res.n == 0);
  CHECK(closure_mask(Alpha(spec.term(0)), b, am, Variant::Strict) == cl_limit);
}

TEST_CASE("threshold failure is reported, not asserted") {
  // membership in C*+ at the limit but at no sequence term: impossible for
  // this construction, so instead use a property that never holds: strongness
  // of A in a structure that is never strong above the limit.
  Alpha half = al("1/2");
  FinStructure b = mk({"a1", "a2", "a3", "b"},
                      {{"a1", "a2", "b"}, {"a1", "a3", "b"}});
  Mask am = b.mask_of({"a1", "a2", "a3"});
  auto spec = SequenceSpec::parse("1/2", "1/(n+3)");
  // A <= B holds at the limit (delta-change exactly 0) but fails at every
  // a_n > 1/2 where the change is negative.
  REQUIRE(is_strong(half, b, am, b.full_mask(), Variant::NonStrict));
  auto res = stabilization_threshold(
      spec,
      [&](const Alpha& an) {
        return is_strong(an, b, am, b.full_mask(), Variant::NonStrict);
      },
      [&]() { return true; }, 32, 4);
  CHECK_FALSE(res.found);
  CHECK(res.horizon == 32);
}
