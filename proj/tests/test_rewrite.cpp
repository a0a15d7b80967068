#include <doctest.h>

#include "core/rewrite.hpp"
#include "helpers.hpp"

using namespace predimlab;
using pdt::al;
using pdt::mk;

namespace {

FinStructure gadget(const std::string& yname = "y1") {
  return mk({"x1", "x2", yname}, {{"x1", "x2", yname}});
}

FormulaPtr sigma1(std::vector<FormulaPtr> bodies = {},
                  const std::string& yname = "y1") {
  FinStructure s = gadget(yname);
  return f_iexists(s, s.mask_of({"x1", "x2"}), s.vertex_names(), {yname},
                   std::move(bodies));
}

FormulaPtr pi1(std::vector<FormulaPtr> bodies = {},
               const std::string& yname = "y1") {
  FinStructure s = gadget(yname);
  return f_iforall(s, s.mask_of({"x1", "x2"}), s.vertex_names(), {yname},
                   std::move(bodies));
}

FinStructure minus_one() {
  return mk({"x1", "x2", "y1", "y2"},
            {{"x1", "y1", "y2"}, {"x2", "y1", "y2"}, {"x1", "x2", "y1"}});
}

}  // namespace

TEST_CASE("amalgam enumeration covers identification and crossing") {
  Alpha one = al("1");
  FinStructure e1 = gadget("u1");
  FinStructure e2 = gadget("w1");
  auto ams = enumerate_amalgams(one, e1, e1.mask_of({"x1", "x2"}), e2,
                                e2.mask_of({"x1", "x2"}), true);
  bool identified = false, disjoint_free = false;
  for (const auto& am : ams) {
    if (am.joint.size() == 3) identified = true;
    if (am.joint.size() == 4 && am.joint.triple_count() == 2) disjoint_free = true;
  }
  CHECK(identified);
  CHECK(disjoint_free);
}

TEST_CASE("conjunction of Sigma-side basics is a corpus-equivalent disjunction") {
  Alpha one = al("1");
  auto corpus = pdt::small_class_corpus(one, Variant::Strict, 5, 3);

  auto f = sigma1();
  auto self = conj_to_canonical(one, f, f);
  CHECK(equivalent_on_corpus_injective(one, f_and({f, f}), self, corpus).equal);
  CHECK(equivalent_on_corpus_injective(one, f, self, corpus).equal);

  auto g = sigma1({}, "y2");
  auto joint = conj_to_canonical(one, f, g);
  CHECK(equivalent_on_corpus_injective(one, f_and({f, g}), joint, corpus).equal);

  auto d1 = f_diag(mk({"x1", "x2"}), {"x1", "x2"});
  CHECK(equivalent_on_corpus_injective(one, f_and({d1, f}),
                                       conj_to_canonical(one, d1, f), corpus)
            .equal);
}

TEST_CASE("conjunction of Pi-side basics: three-disjunct form") {
  Alpha one = al("1");
  auto corpus = pdt::small_class_corpus(one, Variant::Strict, 5, 3);
  auto f = pi1();
  auto g = pi1({}, "y2");
  auto out = conj_to_canonical(one, f, g);
  REQUIRE(out->kind == FKind::Or);
  CHECK(out->kids.size() == 3);
  CHECK(equivalent_on_corpus_injective(one, f_and({f, g}), out, corpus).equal);

  auto self = conj_to_canonical(one, f, f);
  CHECK(equivalent_on_corpus_injective(one, f, self, corpus).equal);
}

TEST_CASE("mismatched Pi bases produce the stated disjunction") {
  Alpha one = al("1");
  auto mk_neg = [&](bool with_triple) {
    std::vector<std::array<std::string, 3>> ts;
    if (with_triple) ts.push_back({"x1", "x2", "x3"});
    ts.push_back({"x1", "x2", "yy"});
    FinStructure ext({"x1", "x2", "x3", "yy"}, ts);
    return f_iforall(ext, ext.mask_of({"x1", "x2", "x3"}), ext.vertex_names(),
                     {"yy"}, {});
  };
  auto f1 = mk_neg(false), f2 = mk_neg(true);
  auto out = conj_to_canonical_displayed(one, f1, f2);
  REQUIRE(out->kind == FKind::Or);
  REQUIRE(out->kids.size() == 2);
  CHECK(out->kids[0] == f1);
  CHECK(out->kids[1] == f2);
  // the adopted claim genuinely fails on the corpus: recorded, not patched
  auto corpus = pdt::small_class_corpus(one, Variant::Strict, 5, 3);
  auto cex = equivalent_on_corpus_injective(one, f_and({f1, f2}), out, corpus);
  CHECK_FALSE(cex.equal);
}

TEST_CASE("implication_to_pc: shapes and corpus equivalence") {
  Alpha one = al("1");
  auto corpus = pdt::small_class_corpus(one, Variant::Strict, 5, 3);
  FinStructure b = gadget();
  Mask base = b.mask_of({"x1", "x2"});
  FormulaPtr diag_fo = expand_to_fo(f_diag(b, b.vertex_names()), one);
  FormulaPtr phi = f_and({diag_fo, fo_not(fo_rel("x1", "y1", "zx"))});

  FormulaPtr out0 = implication_to_pc(one, phi, b, base, b.vertex_names(),
                                      {"y1"}, {});
  CHECK(out0->kind == FKind::IntrinsicForall);

  FormulaPtr orig = fo_forall("y1", f_or({fo_not(phi), triv_false("x1")}));
  int checked = 0;
  for (const auto& m : corpus) {
    if (m.size() < 3) continue;
    for (int v1 = 0; v1 < m.size(); ++v1)
      for (int v2 = 0; v2 < m.size(); ++v2)
        for (int v3 = 0; v3 < m.size(); ++v3) {
          if (v1 == v2 || v1 == v3 || v2 == v3) continue;
          Assignment asg{{"x1", v1}, {"x2", v2}, {"zx", v3}};
          CHECK(eval_closure(one, m, out0, asg) == eval_fo(m, orig, asg));
          ++checked;
        }
    if (checked > 600) break;
  }
  CHECK(checked > 100);
}

TEST_CASE("to_primary: primary inputs pass through unchanged") {
  Alpha one = al("1");
  auto f = sigma1();
  auto res = to_primary_disjunction(one, f);
  REQUIRE(res.reduced);
  REQUIRE(res.disjuncts.size() == 1);
  CHECK(res.disjuncts[0] == f);

  auto p = pi1();
  auto res2 = to_primary_disjunction(one, p);
  REQUIRE(res2.reduced);
  CHECK(res2.disjuncts.size() == 1);
  CHECK(res2.disjuncts[0] == p);
}

TEST_CASE("to_primary: non-strong base goes through the bounded exists") {
  Alpha one = al("1");
  FinStructure b = minus_one();
  Mask base = b.mask_of({"x1", "x2"});
  REQUIRE(is_intrinsic(one, b, base, b.full_mask(), Variant::Strict));
  REQUIRE_FALSE(is_strong(one, b, base, b.full_mask(), Variant::NonStrict));
  auto f = f_iforall(b, base, b.vertex_names(), {"y1", "y2"}, {});
  auto res = to_primary_disjunction(one, f);
  REQUIRE(res.reduced);
  REQUIRE(res.disjuncts.size() == 1);
  const auto& out = res.disjuncts[0];
  CHECK(out->kind == FKind::BoundedExists);
  CHECK(out->eta ==
        mu_eta(one, b, base, closure_mask(one, b, base, Variant::NonStrict)));
  CHECK(is_primary(out, one));

  auto corpus = pdt::small_class_corpus(one, Variant::Strict, 6, 4);
  CHECK(equivalent_on_corpus_injective(one, f, out, corpus).equal);
}

TEST_CASE("to_primary: negated diagrams become class-diagram disjunctions") {
  Alpha one = al("1");
  auto nd = f_neg_diag(mk({"u", "v", "w"}, {{"u", "v", "w"}}), {"x1", "x2", "x3"});
  auto res = to_primary_disjunction(one, nd);
  REQUIRE(res.reduced);
  CHECK(res.disjuncts.size() >= 1);
  auto out = res.disjuncts.size() == 1 ? res.disjuncts[0] : f_or(res.disjuncts);
  auto corpus = pdt::small_class_corpus(one, Variant::Strict, 5, 3);
  CHECK(equivalent_on_corpus_injective(one, nd, out, corpus).equal);
}

TEST_CASE("to_primary: unsupported body guards are reported, not faked") {
  Alpha one = al("1");
  FinStructure b = gadget();
  FinStructure c = mk({"x1", "x2", "y1", "z1", "z2"},
                      {{"x1", "x2", "y1"},
                       {"x1", "z1", "z2"},
                       {"x2", "z1", "z2"},
                       {"y1", "z1", "z2"}});
  Mask cbase = c.mask_of({"x1", "x2", "y1"});
  REQUIRE(is_intrinsic(one, c, cbase, c.full_mask(), Variant::Strict));
  REQUIRE_FALSE(is_strong(one, c, cbase, c.full_mask(), Variant::NonStrict));
  auto body = f_iexists(c, cbase, c.vertex_names(), {"z1", "z2"}, {});
  auto f = f_iforall(b, b.mask_of({"x1", "x2"}), b.vertex_names(), {"y1"},
                     {body});
  auto res = to_primary_disjunction(one, f);
  CHECK_FALSE(res.reduced);
  CHECK(!res.diagnostic.empty());
}

TEST_CASE("to_primary handles disjunctions and Sigma-side conjunctions") {
  Alpha one = al("1");
  auto corpus = pdt::small_class_corpus(one, Variant::Strict, 5, 3);
  auto f = f_or({sigma1(), f_and({sigma1({}, "y2"), sigma1({}, "y3")})});
  auto res = to_primary_disjunction(one, f);
  REQUIRE(res.reduced);
  for (const auto& d : res.disjuncts) CHECK(is_primary(d, one));
  auto out = f_or(res.disjuncts);
  CHECK(equivalent_on_corpus_injective(one, f, out, corpus).equal);
}
