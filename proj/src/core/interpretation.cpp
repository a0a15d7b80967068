#include "interpretation.hpp"

#include <algorithm>
#include <set>

namespace predimlab {

namespace {

FinStructure renamed(const FinStructure& s,
                     const std::map<std::string, std::string>& ren) {
  auto r = [&](const std::string& nm) {
    auto it = ren.find(nm);
    return it == ren.end() ? nm : it->second;
  };
  std::vector<std::string> vs;
  for (const auto& nm : s.vertex_names()) vs.push_back(r(nm));
  std::vector<std::array<std::string, 3>> ts;
  for (const auto& t : s.triples())
    ts.push_back({r(s.name(t.v[0])), r(s.name(t.v[1])), r(s.name(t.v[2]))});
  return FinStructure(std::move(vs), std::move(ts));
}

// glue a pattern over placed vertices: pattern vertices found in `place`
// map there, the rest get fresh names with the given prefix
FinStructure glue(const FinStructure& host, const FinStructure& pattern,
                  std::map<std::string, std::string>& place,
                  const std::string& prefix) {
  int fi = 0;
  std::vector<std::string> names = host.vertex_names();
  for (const auto& nm : pattern.vertex_names())
    if (!place.count(nm)) {
      std::string f;
      do {
        f = prefix + std::to_string(fi++);
      } while (host.has_vertex(f));
      place[nm] = f;
      names.push_back(f);
    }
  std::vector<std::array<std::string, 3>> ts;
  for (const auto& t : host.triples())
    ts.push_back({host.name(t.v[0]), host.name(t.v[1]), host.name(t.v[2])});
  for (const auto& t : pattern.triples()) {
    std::array<std::string, 3> named{place[pattern.name(t.v[0])],
                                     place[pattern.name(t.v[1])],
                                     place[pattern.name(t.v[2])]};
    std::sort(named.begin(), named.end());
    bool present = false;
    for (const auto& ht : ts) {
      auto sorted = ht;
      std::sort(sorted.begin(), sorted.end());
      if (sorted == named) present = true;
    }
    if (!present) ts.push_back(named);
  }
  return FinStructure(std::move(names), std::move(ts));
}

}  // namespace

RationalFixture RationalFixture::standard(const Alpha& a) {
  RationalFixture fx{a, FinStructure({"a1", "a2"}, {}), {}, {}};
  ZeroGadgetOptions ob;
  ob.fresh_prefix = "b";
  ob.max_multiplier = 4;
  fx.bgadget = zero_minimal_pair(a, fx.base, ob);
  ZeroGadgetOptions oc;
  oc.fresh_prefix = "c";
  oc.exclude_new_sizes = {fx.bgadget.size() - fx.base.size()};
  oc.max_multiplier = 4;
  oc.exclude_iso_over_base = {fx.bgadget};
  fx.cgadget = zero_minimal_pair(a, fx.base, oc);
  fx.validate();
  return fx;
}

void RationalFixture::validate() const {
  Mask ab = bgadget.mask_of(base.vertex_names());
  Mask ac = cgadget.mask_of(base.vertex_names());
  if (!is_minimal_pair(alpha, bgadget, ab, bgadget.full_mask(), Variant::Strict) ||
      !is_minimal_pair(alpha, cgadget, ac, cgadget.full_mask(), Variant::Strict))
    fail(Errc::precondition, "fixture: gadgets are not strict minimal pairs");
  if (delta_rel(alpha, bgadget, bgadget.full_mask(), ab) != Rat(0) ||
      delta_rel(alpha, cgadget, cgadget.full_mask(), ac) != Rat(0))
    fail(Errc::precondition, "fixture: gadgets are not zero extensions");
  std::vector<int> b_ix, c_ix;
  for (const auto& nm : base.vertex_names()) {
    b_ix.push_back(bgadget.index_of(nm));
    c_ix.push_back(cgadget.index_of(nm));
  }
  if (bgadget.size() == cgadget.size() &&
      isomorphic_over(bgadget, cgadget, b_ix, c_ix))
    fail(Errc::precondition, "fixture: gadgets are isomorphic over the base");
  if (!in_class(alpha, bgadget, Variant::Strict) ||
      !in_class(alpha, cgadget, Variant::Strict))
    fail(Errc::precondition, "fixture: gadget leaves the class");
}

FinStructure coding_gadget(const Alpha& a, int k) {
  // The exposed coding relations are R^1 and R^2 (symmetric in the set
  // positions); arities 3 and 4 exist only as plumbing for product codes,
  // where members are canonically sorted and symmetry is not needed.
  if (k < 1 || k > 4)
    fail(Errc::unsupported, "coding gadget supported for k in 1..4");
  std::vector<std::string> names;
  for (int i = 1; i <= k; ++i) names.push_back("s" + std::to_string(i));
  names.push_back("v");
  FinStructure base(names, {});
  ZeroGadgetOptions opts;
  opts.fresh_prefix = "u";
  opts.cover_base = true;
  opts.max_multiplier = 6;
  opts.search_cap = 6000000;
  // Every triple must touch at least two fresh vertices: a triple carrying
  // a lone fresh vertex lets decode permute the member/witness roles, which
  // breaks the exact round trip.  (k = 2 additionally demands symmetry in
  // the set positions.)
  opts.accept = [&base, k](const FinStructure& cand) {
    Mask base_mask = cand.mask_of(base.vertex_names());
    for (const auto& t : cand.triples())
      if (popcount(t.mask & ~base_mask) < 2) return false;
    if (k == 2) {
      std::vector<int> ixs, swapped;
      for (const auto& nm : base.vertex_names()) ixs.push_back(cand.index_of(nm));
      swapped = ixs;
      std::swap(swapped[0], swapped[1]);  // s1 <-> s2
      if (!isomorphic_over(cand, cand, ixs, swapped)) return false;
    }
    return true;
  };
  return zero_minimal_pair(a, base, opts);
}

namespace {

// Is the gadget realized over the anchored tuple with its prescribed
// diagram?  Triples touching the fresh part are preserved and reflected;
// triples inside the anchored base are unconstrained.
bool gadget_realized(const FinStructure& fragment, const FinStructure& gadget,
                     const std::vector<int>& anchor) {
  Mask fresh = 0;
  for (int i = 0; i < gadget.size(); ++i)
    if (anchor[i] < 0) fresh |= bit(i);
  std::vector<int> order;
  for (int i = 0; i < gadget.size(); ++i)
    if (anchor[i] < 0) order.push_back(i);
  std::vector<int> map = anchor;
  Mask used = 0;
  for (int v : anchor)
    if (v >= 0) used |= bit(v);
  std::function<bool(size_t)> dfs = [&](size_t next) -> bool {
    if (next == order.size()) return true;
    int g = order[next];
    for (int cand = 0; cand < fragment.size(); ++cand) {
      if (used & bit(cand)) continue;
      map[g] = cand;
      bool ok = true;
      // check gadget triples among assigned vertices touching fresh
      for (int x = 0; x < gadget.size() && ok; ++x) {
        if (map[x] < 0 || x == g) continue;
        for (int y = x + 1; y < gadget.size() && ok; ++y) {
          if (map[y] < 0 || y == g) continue;
          Mask tm = bit(x) | bit(y) | bit(g);
          if (!(tm & fresh)) continue;
          if (gadget.has_triple(x, y, g) !=
              fragment.has_triple(map[x], map[y], cand))
            ok = false;
        }
      }
      // no extra fragment triples at cand into the assigned pattern are
      // allowed beyond the gadget's (prescribed diagram): the check above
      // already reflects all pattern-internal ones
      if (ok) {
        used |= bit(cand);
        if (dfs(next + 1)) return true;
        used &= ~bit(cand);
      }
      map[g] = -1;
    }
    return false;
  };
  return dfs(0);
}

}  // namespace

FormulaPtr coding_formula(const Alpha& a, int k,
                          const std::vector<std::string>& yvars,
                          const std::string& vvar) {
  if (static_cast<int>(yvars.size()) != k)
    fail(Errc::invalid_argument, "coding_formula: need k set variables");
  FinStructure g = coding_gadget(a, k);
  // variable per gadget vertex: s_i -> yvars[i], v -> vvar, fresh -> u_i
  std::map<std::string, std::string> var;
  for (int i = 1; i <= k; ++i) var["s" + std::to_string(i)] = yvars[i - 1];
  var["v"] = vvar;
  std::vector<std::string> fresh_vars;
  int ui = 0;
  for (const auto& nm : g.vertex_names())
    if (!var.count(nm)) {
      var[nm] = "u" + std::to_string(ui++) + "_";
      fresh_vars.push_back(var[nm]);
    }
  // body: distinctness + positive triples + negatives touching the fresh part
  std::vector<FormulaPtr> lits;
  std::vector<std::string> all;
  for (const auto& nm : g.vertex_names()) all.push_back(var[nm]);
  for (size_t i = 0; i < all.size(); ++i)
    for (size_t j = i + 1; j < all.size(); ++j)
      lits.push_back(fo_not(fo_eq(all[i], all[j])));
  Mask fresh_mask = 0;
  for (const auto& nm : g.vertex_names())
    if (nm != "v" && nm[0] != 's') fresh_mask |= bit(g.index_of(nm));
  for (int x = 0; x < g.size(); ++x)
    for (int y = x + 1; y < g.size(); ++y)
      for (int z = y + 1; z < g.size(); ++z) {
        Mask tm = bit(x) | bit(y) | bit(z);
        auto atom = fo_rel(var[g.name(x)], var[g.name(y)], var[g.name(z)]);
        if (g.has_triple(x, y, z))
          lits.push_back(atom);
        else if (tm & fresh_mask)
          lits.push_back(fo_not(atom));
      }
  FormulaPtr body = f_and(std::move(lits));
  for (auto it = fresh_vars.rbegin(); it != fresh_vars.rend(); ++it)
    body = fo_exists(*it, body);
  return body;
}

namespace {

std::vector<std::vector<std::string>> decode_impl(const Alpha& a,
                                                  const FinStructure& fragment,
                                                  const std::string& v, int k) {
  FinStructure g = coding_gadget(a, k);
  std::vector<std::vector<std::string>> out;
  int vix = fragment.index_of(v);
  if (vix < 0) fail(Errc::invalid_argument, "decode: unknown code vertex");
  std::vector<int> pick;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(pick.size()) == k) {
      std::vector<int> anchor(g.size(), -1);
      // set positions are filled in sorted-name order; the exposed gadgets
      // are symmetric in them, and product codes are built sorted
      std::vector<std::pair<std::string, int>> named;
      for (int ix : pick) named.push_back({fragment.name(ix), ix});
      std::sort(named.begin(), named.end());
      for (int i = 0; i < k; ++i)
        anchor[g.index_of("s" + std::to_string(i + 1))] = named[i].second;
      anchor[g.index_of("v")] = vix;
      if (gadget_realized(fragment, g, anchor)) {
        std::vector<std::string> names;
        for (auto& [nm, ix] : named) names.push_back(nm);
        out.push_back(std::move(names));
      }
      return;
    }
    for (int ix = start; ix < fragment.size(); ++ix) {
      if (ix == vix) continue;
      pick.push_back(ix);
      rec(ix + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return out;
}

}  // namespace

DecodeResult decode(const Alpha& a, const FinStructure& fragment,
                    const std::string& v, int k) {
  DecodeResult res;
  res.family = decode_impl(a, fragment, v, k);
  res.code_vertex_known = !res.family.empty();
  return res;
}

CodeResult build_code(const Alpha& a, const FinStructure& fragment,
                      const std::vector<std::string>& support, int k,
                      const std::vector<std::vector<std::string>>& family) {
  for (const auto& nm : support)
    if (!fragment.has_vertex(nm))
      fail(Errc::invalid_argument, "build_code: support vertex missing");
  std::set<std::string> sup(support.begin(), support.end());
  for (const auto& member : family) {
    if (static_cast<int>(member.size()) != k)
      fail(Errc::invalid_argument, "build_code: family member of wrong arity");
    for (const auto& nm : member)
      if (!sup.count(nm))
        fail(Errc::invalid_argument, "build_code: member outside the support");
  }
  FinStructure g = coding_gadget(a, k);
  CodeResult res;
  // fresh code vertex
  int ci = 0;
  std::string v;
  do {
    v = "code" + std::to_string(ci++);
  } while (fragment.has_vertex(v));
  {
    std::vector<std::string> names = fragment.vertex_names();
    names.push_back(v);
    std::vector<std::array<std::string, 3>> ts;
    for (const auto& t : fragment.triples())
      ts.push_back({fragment.name(t.v[0]), fragment.name(t.v[1]),
                    fragment.name(t.v[2])});
    res.fragment = FinStructure(names, ts);
  }
  res.code_vertex = v;
  int gi = 0;
  for (const auto& member : family) {
    std::vector<std::string> sorted = member;
    std::sort(sorted.begin(), sorted.end());
    std::map<std::string, std::string> place;
    for (int i = 0; i < k; ++i) place["s" + std::to_string(i + 1)] = sorted[i];
    place["v"] = v;
    res.fragment = glue(res.fragment, g, place, "g" + std::to_string(gi++) + "_");
  }
  if (!in_class(a, res.fragment, Variant::Strict,
                res.fragment.size() > 24 ? 6 : 0))
    fail(Errc::precondition, "build_code: fragment left the class");
  // round trip (codes for other vertices must not pick up the new gadgets)
  auto back = decode_impl(a, res.fragment, v, k);
  std::set<std::vector<std::string>> want, got;
  for (auto member : family) {
    std::sort(member.begin(), member.end());
    want.insert(member);
  }
  for (auto member : back) {
    std::sort(member.begin(), member.end());
    got.insert(member);
  }
  if (want != got)
    fail(Errc::precondition, "build_code: decode round trip failed");
  return res;
}

CodeResult setop_union(const Alpha& a, const FinStructure& fragment, int k,
                       const std::string& v1, const std::string& v2) {
  auto x1 = decode_impl(a, fragment, v1, k);
  auto x2 = decode_impl(a, fragment, v2, k);
  std::set<std::vector<std::string>> fam;
  auto norm = [](std::vector<std::string> m) {
    std::sort(m.begin(), m.end());
    return m;
  };
  std::set<std::string> support;
  for (auto& m : x1) {
    for (auto& e : m) support.insert(e);
    fam.insert(norm(m));
  }
  for (auto& m : x2) {
    for (auto& e : m) support.insert(e);
    fam.insert(norm(m));
  }
  return build_code(a, fragment,
                    std::vector<std::string>(support.begin(), support.end()), k,
                    std::vector<std::vector<std::string>>(fam.begin(), fam.end()));
}

CodeResult setop_product(const Alpha& a, const FinStructure& fragment, int k,
                         const std::string& v1, const std::string& v2) {
  auto x1 = decode_impl(a, fragment, v1, k);
  auto x2 = decode_impl(a, fragment, v2, k);
  // disjoint supports required
  std::set<std::string> s1, s2;
  for (auto& m : x1)
    for (auto& e : m) s1.insert(e);
  for (auto& m : x2)
    for (auto& e : m) s2.insert(e);
  for (const auto& e : s1)
    if (s2.count(e))
      fail(Errc::precondition, "setop_product: supports are not disjoint");
  std::set<std::vector<std::string>> fam;
  for (auto& m1 : x1)
    for (auto& m2 : x2) {
      std::vector<std::string> u = m1;
      u.insert(u.end(), m2.begin(), m2.end());
      std::sort(u.begin(), u.end());
      fam.insert(u);
    }
  std::set<std::string> support = s1;
  support.insert(s2.begin(), s2.end());
  return build_code(a, fragment,
                    std::vector<std::string>(support.begin(), support.end()),
                    2 * k,
                    std::vector<std::vector<std::string>>(fam.begin(), fam.end()));
}

bool setop_injection(const Alpha& a, const FinStructure& fragment, int k,
                     const std::string& v1, const std::string& v2) {
  return decode_impl(a, fragment, v1, k).size() <=
         decode_impl(a, fragment, v2, k).size();
}

bool setop_bijection(const Alpha& a, const FinStructure& fragment, int k,
                     const std::string& v1, const std::string& v2) {
  return decode_impl(a, fragment, v1, k).size() ==
         decode_impl(a, fragment, v2, k).size();
}

RepResult build_rational_rep(const RationalFixture& fx, long long p, long long q) {
  if (p < 0 || q < 1)
    fail(Errc::invalid_argument, "rational rep needs p >= 0, q >= 1");
  RepResult res;
  res.fragment = fx.base;
  res.abar = fx.base.vertex_names();
  for (long long i = 0; i < p; ++i) {
    std::map<std::string, std::string> place;
    for (const auto& nm : fx.base.vertex_names()) place[nm] = nm;
    res.fragment = glue(res.fragment, fx.bgadget, place,
                        "b" + std::to_string(i) + "_");
  }
  for (long long i = 0; i < q; ++i) {
    std::map<std::string, std::string> place;
    for (const auto& nm : fx.base.vertex_names()) place[nm] = nm;
    res.fragment = glue(res.fragment, fx.cgadget, place,
                        "c" + std::to_string(i) + "_");
  }
  if (!in_class(fx.alpha, res.fragment, Variant::Strict,
                res.fragment.size() > 24 ? 6 : 0))
    fail(Errc::precondition, "rational rep left the class");
  auto counts = read_rational(fx, res.fragment, res.abar);
  if (counts.first != p || counts.second != q)
    fail(Errc::precondition, "rational rep: copy counts disagree (interference)");
  return res;
}

namespace {

std::vector<Mask> copies_over(const FinStructure& fragment,
                              const FinStructure& gadget,
                              const FinStructure& base,
                              const std::vector<std::string>& abar) {
  std::vector<int> anchor(gadget.size(), -1);
  for (size_t i = 0; i < base.vertex_names().size(); ++i) {
    int gix = gadget.index_of(base.vertex_names()[i]);
    anchor[gix] = fragment.index_of(abar[i]);
    if (anchor[gix] < 0)
      fail(Errc::invalid_argument, "tuple vertex missing from the fragment");
  }
  std::vector<Mask> images;
  for (const auto& mp : enumerate_copy_maps(fragment, gadget, anchor)) {
    Mask img = 0;
    for (size_t i = 0; i < mp.size(); ++i)
      if (anchor[i] < 0) img |= bit(mp[i]);
    images.push_back(img);
  }
  return images;
}

}  // namespace

std::pair<long long, long long> read_rational(const RationalFixture& fx,
                                              const FinStructure& fragment,
                                              const std::vector<std::string>& abar) {
  if (abar.size() != fx.base.vertex_names().size())
    fail(Errc::precondition, "tuple arity mismatch");
  // abar must carry A's diagram
  {
    std::vector<int> tuple;
    for (const auto& nm : abar) {
      int ix = fragment.index_of(nm);
      if (ix < 0) fail(Errc::invalid_argument, "tuple vertex missing");
      tuple.push_back(ix);
    }
    const auto& bn = fx.base.vertex_names();
    for (size_t i = 0; i < bn.size(); ++i)
      for (size_t j = i + 1; j < bn.size(); ++j)
        for (size_t l = j + 1; l < bn.size(); ++l)
          if (fx.base.has_triple(fx.base.index_of(bn[i]), fx.base.index_of(bn[j]),
                                 fx.base.index_of(bn[l])) !=
              fragment.has_triple(tuple[i], tuple[j], tuple[l]))
            fail(Errc::precondition, "tuple does not carry the base diagram");
  }
  auto bcopies = copies_over(fragment, fx.bgadget, fx.base, abar);
  auto ccopies = copies_over(fragment, fx.cgadget, fx.base, abar);
  // membership: distinct copies meet exactly in the base
  auto disjoint = [&](const std::vector<Mask>& xs, const std::vector<Mask>& ys,
                      bool same) {
    for (size_t i = 0; i < xs.size(); ++i)
      for (size_t j = same ? i + 1 : 0; j < ys.size(); ++j)
        if (xs[i] & ys[j]) return false;
    return true;
  };
  if (!disjoint(bcopies, bcopies, true) || !disjoint(ccopies, ccopies, true) ||
      !disjoint(bcopies, ccopies, false))
    fail(Errc::precondition, "tuple violates the copy-intersection conditions");
  if (ccopies.empty())
    fail(Errc::precondition, "tuple has no denominator copy");
  return {static_cast<long long>(bcopies.size()),
          static_cast<long long>(ccopies.size())};
}

bool eval_equiv(const RationalFixture& fx, const FinStructure& fragment,
                const std::vector<std::string>& a1,
                const std::vector<std::string>& a2) {
  auto r1 = read_rational(fx, fragment, a1);
  auto r2 = read_rational(fx, fragment, a2);
  return Rat(r1.first) * Rat(r2.second) == Rat(r2.first) * Rat(r1.second);
}

bool eval_order(const RationalFixture& fx, const FinStructure& fragment,
                const std::vector<std::string>& a1,
                const std::vector<std::string>& a2) {
  auto r1 = read_rational(fx, fragment, a1);
  auto r2 = read_rational(fx, fragment, a2);
  return Rat(r1.first) * Rat(r2.second) < Rat(r2.first) * Rat(r1.second);
}

bool eval_mul(const RationalFixture& fx, const FinStructure& fragment,
              const std::vector<std::string>& a1,
              const std::vector<std::string>& a2,
              const std::vector<std::string>& a3) {
  auto r1 = read_rational(fx, fragment, a1);
  auto r2 = read_rational(fx, fragment, a2);
  auto r3 = read_rational(fx, fragment, a3);
  return Rat(r3.first) * (Rat(r1.second) * Rat(r2.second)) ==
         Rat(r3.second) * (Rat(r1.first) * Rat(r2.first));
}

bool eval_add(const RationalFixture& fx, const FinStructure& fragment,
              const std::vector<std::string>& a1,
              const std::vector<std::string>& a2,
              const std::vector<std::string>& a3) {
  auto r1 = read_rational(fx, fragment, a1);
  auto r2 = read_rational(fx, fragment, a2);
  auto r3 = read_rational(fx, fragment, a3);
  return Rat(r3.first) * (Rat(r1.second) * Rat(r2.second)) ==
         Rat(r3.second) *
             (Rat(r1.first) * Rat(r2.second) + Rat(r2.first) * Rat(r1.second));
}

bool eval_relation_formula(const RationalFixture& fx, const std::string& kind,
                           const FinStructure& fragment,
                           const std::vector<std::vector<std::string>>& tuples) {
  if (fragment.size() > 40)
    fail(Errc::size_cap, "formula-level evaluation capped at 40 vertices");
  const Alpha& a = fx.alpha;

  // A coded family is materialized inside the working fragment while the
  // vertex budget lasts; afterwards members are carried virtually and the
  // cardinality primitives compare the decoded families directly.
  struct Fam {
    std::vector<std::vector<std::string>> members;
  };
  FinStructure work = fragment;
  constexpr int kBudget = 56;

  auto materialize = [&](const Fam& fam, int k) {
    std::set<std::string> sup;
    for (const auto& m : fam.members)
      for (const auto& e : m) sup.insert(e);
    int projected = work.size() + 1 +
                    static_cast<int>(fam.members.size()) *
                        (coding_gadget(a, k).size() - (k + 1));
    if (projected > kBudget) return false;
    auto cr = build_code(a, work, {sup.begin(), sup.end()}, k, fam.members);
    work = cr.fragment;
    // in-fragment verification: the decoded family is exactly the intended
    // one (build_code already checked the round trip)
    return true;
  };

  auto basis_family = [&](const FinStructure& gadget,
                          const std::vector<std::string>& abar) {
    Fam fam;
    std::vector<int> anchor(gadget.size(), -1);
    for (size_t i = 0; i < fx.base.vertex_names().size(); ++i)
      anchor[gadget.index_of(fx.base.vertex_names()[i])] =
          work.index_of(abar[i]);
    for (const auto& mp : enumerate_copy_maps(work, gadget, anchor)) {
      std::vector<std::string> fresh;
      for (size_t i = 0; i < mp.size(); ++i)
        if (anchor[i] < 0) fresh.push_back(work.name(mp[i]));
      fam.members.push_back({*std::min_element(fresh.begin(), fresh.end())});
    }
    return fam;
  };

  auto product = [&](const Fam& f1, const Fam& f2) {
    Fam out;
    for (const auto& m1 : f1.members)
      for (const auto& m2 : f2.members) {
        std::vector<std::string> u = m1;
        u.insert(u.end(), m2.begin(), m2.end());
        std::sort(u.begin(), u.end());
        out.members.push_back(u);
      }
    return out;
  };
  auto funion = [&](const Fam& f1, const Fam& f2) {
    std::set<std::vector<std::string>> fam;
    for (auto m : f1.members) fam.insert(m);
    for (auto m : f2.members) fam.insert(m);
    Fam out;
    out.members.assign(fam.begin(), fam.end());
    return out;
  };

  // phi_A membership and the basis codes (always materialized: R^1)
  std::vector<Fam> bfam, cfam;
  for (const auto& t : tuples) {
    read_rational(fx, work, t);
    Fam bb = basis_family(fx.bgadget, t);
    materialize(bb, 1);
    bfam.push_back(bb);
    Fam cc = basis_family(fx.cgadget, t);
    materialize(cc, 1);
    cfam.push_back(cc);
  }

  if (kind == "E" || kind == "O") {
    Fam w1 = product(bfam[0], cfam[1]);
    Fam w2 = product(bfam[1], cfam[0]);
    materialize(w1, 2);
    materialize(w2, 2);
    if (kind == "E") return w1.members.size() == w2.members.size();
    return w1.members.size() < w2.members.size();
  }
  if (kind == "M") {
    Fam w1 = product(bfam[0], bfam[1]);
    Fam w2 = product(cfam[0], cfam[1]);
    materialize(w1, 2);
    materialize(w2, 2);
    Fam lhs = product(w1, cfam[2]);
    Fam rhs = product(w2, bfam[2]);
    materialize(lhs, 3);
    materialize(rhs, 3);
    return lhs.members.size() == rhs.members.size();
  }
  if (kind == "A") {
    Fam w1 = product(bfam[0], cfam[1]);
    Fam w2 = product(bfam[1], cfam[0]);
    Fam w3 = product(cfam[0], cfam[1]);
    materialize(w1, 2);
    materialize(w2, 2);
    Fam su = funion(w1, w2);
    Fam lhs = product(su, cfam[2]);
    Fam rhs = product(w3, bfam[2]);
    return lhs.members.size() == rhs.members.size();
  }
  fail(Errc::invalid_argument, "unknown relation kind \'" + kind + "\'");
}

int InterpFormula::count_ops(const std::string& op) const {
  int n = 0;
  std::function<void(const nlohmann::json&)> walk = [&](const nlohmann::json& j) {
    if (j.is_object()) {
      if (j.contains("op") && j.at("op") == op) ++n;
      for (const auto& [k, v] : j.items()) walk(v);
    } else if (j.is_array()) {
      for (const auto& v : j) walk(v);
    }
  };
  walk(ast);
  return n;
}

InterpFormula emit_formula(const RationalFixture& fx, const std::string& kind) {
  using nlohmann::json;
  auto op = [](const std::string& o, std::vector<json> args) {
    return json{{"op", o}, {"args", args}};
  };
  auto conj = [](std::vector<json> parts) {
    return json{{"op", "and"}, {"args", parts}};
  };
  InterpFormula f;
  f.kind = kind;
  int n = fx.base.size();
  auto xt = [&](int i) {
    std::vector<json> xs;
    for (int k = 1; k <= n; ++k)
      xs.push_back("x" + std::to_string(i) + "_" + std::to_string(k));
    return xs;
  };
  if (kind == "phi_A") {
    f.ast = op("phi_A", xt(1));
    return f;
  }
  if (kind == "beta" || kind == "gamma") {
    auto args = xt(1);
    args.push_back("v");
    f.ast = op(kind, args);
    return f;
  }
  auto member = [&](const std::string& o, int i, const std::string& code) {
    auto args = xt(i);
    args.push_back(code);
    return op(o, args);
  };
  if (kind == "E" || kind == "O") {
    std::vector<json> parts{op("phi_A", xt(1)), op("phi_A", xt(2)),
                            member("beta", 1, "u1"), member("beta", 2, "u2"),
                            member("gamma", 1, "v1"), member("gamma", 2, "v2"),
                            op("pi1", {"u1", "v2", "w1"}),
                            op("pi1", {"u2", "v1", "w2"})};
    parts.push_back(kind == "E" ? op("theta2", {"w1", "w2"})
                                : op("eta2", {"w1", "w2"}));
    f.ast = json{{"op", "exists"},
                 {"vars", {"u1", "u2", "v1", "v2", "w1", "w2"}},
                 {"body", conj(parts)}};
    return f;
  }
  if (kind == "M") {
    std::vector<json> parts{
        op("phi_A", xt(1)),          op("phi_A", xt(2)),
        op("phi_A", xt(3)),          member("beta", 1, "u1"),
        member("beta", 2, "u2"),     member("beta", 3, "u3"),
        member("gamma", 1, "v1"),    member("gamma", 2, "v2"),
        member("gamma", 3, "v3"),    op("pi1", {"u1", "u2", "w1"}),
        op("pi1", {"v1", "v2", "w2"}), op("theta2", {"w1", "u3"}),
        op("theta2", {"w2", "v3"})};
    f.ast = json{{"op", "exists"},
                 {"vars", {"u1", "u2", "u3", "v1", "v2", "v3", "w1", "w2"}},
                 {"body", conj(parts)}};
    return f;
  }
  if (kind == "A") {
    std::vector<json> parts{
        op("phi_A", xt(1)),           op("phi_A", xt(2)),
        op("phi_A", xt(3)),           member("beta", 1, "u1"),
        member("beta", 2, "u2"),      member("beta", 3, "u3"),
        member("gamma", 1, "v1"),     member("gamma", 2, "v2"),
        member("gamma", 3, "v3"),     op("pi1", {"u1", "v2", "w1"}),
        op("pi1", {"v1", "u2", "w2"}), op("pi1", {"v1", "v2", "w3"}),
        op("upsilon2", {"w1", "w2", "s"}), op("theta2", {"s", "u3"}),
        op("theta2", {"w3", "v3"})};
    f.ast = json{{"op", "exists"},
                 {"vars", {"u1", "u2", "u3", "v1", "v2", "v3", "w1", "w2", "w3", "s"}},
                 {"body", conj(parts)}};
    return f;
  }
  fail(Errc::invalid_argument, "unknown formula kind '" + kind + "'");
}

namespace {

RepResult rep_with_prefix(const RationalFixture& fx, long long p, long long q,
                          const std::string& prefix) {
  RepResult plain = build_rational_rep(fx, p, q);
  std::map<std::string, std::string> ren;
  for (const auto& nm : plain.fragment.vertex_names()) ren[nm] = prefix + nm;
  RepResult out;
  out.fragment = renamed(plain.fragment, ren);
  for (const auto& nm : plain.abar) out.abar.push_back(prefix + nm);
  return out;
}

FinStructure union_structures(const std::vector<FinStructure>& parts) {
  std::vector<std::string> names;
  std::vector<std::array<std::string, 3>> ts;
  for (const auto& s : parts) {
    for (const auto& nm : s.vertex_names()) names.push_back(nm);
    for (const auto& t : s.triples())
      ts.push_back({s.name(t.v[0]), s.name(t.v[1]), s.name(t.v[2])});
  }
  return FinStructure(std::move(names), std::move(ts));
}

}  // namespace

DensityDemo density_chain(const RationalFixture& fx, const Rat& r1,
                          const Rat& r2, int count) {
  if (!(r1 < r2)) fail(Errc::precondition, "density: need r1 < r2");
  if (count < 2) fail(Errc::invalid_argument, "density: need at least 2 values");
  std::vector<Rat> values{r1, r2};
  while (static_cast<int>(values.size()) < count) {
    // insert the mediant of the currently widest adjacent gap
    size_t best = 0;
    Rat best_gap = values[1] - values[0];
    for (size_t i = 1; i + 1 < values.size(); ++i)
      if (values[i + 1] - values[i] > best_gap) {
        best_gap = values[i + 1] - values[i];
        best = i;
      }
    Rat med(values[best].num() + values[best + 1].num(),
            values[best].den() + values[best + 1].den());
    values.insert(values.begin() + best + 1, med);
  }
  DensityDemo demo;
  demo.values = values;
  std::vector<FinStructure> parts;
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i].num() < 0)
      fail(Errc::precondition, "density: negative representative");
    RepResult r = rep_with_prefix(fx, values[i].num(), values[i].den(),
                                  "r" + std::to_string(i) + "_");
    parts.push_back(r.fragment);
    demo.tuples.push_back(r.abar);
  }
  demo.fragment = union_structures(parts);
  // certify every adjacent insertion
  for (size_t i = 0; i + 1 < demo.tuples.size(); ++i)
    if (!eval_order(fx, demo.fragment, demo.tuples[i], demo.tuples[i + 1]))
      fail(Errc::precondition, "density: order certificate failed");
  return demo;
}

DensityDemo fmp_density_demo(const RationalFixture& fx, const Rat& r1,
                             const Rat& r2) {
  return density_chain(fx, r1, r2, 3);
}

}  // namespace predimlab
