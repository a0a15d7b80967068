#include "rewrite.hpp"

#include <algorithm>
#include <set>

namespace predimlab {

namespace {

constexpr int kCrossingCap = 14;

// capture-free variable renaming (generated bound names never collide)
FormulaPtr subst(const FormulaPtr& f, const std::map<std::string, std::string>& ren) {
  auto rn = [&](const std::string& v) {
    auto it = ren.find(v);
    return it == ren.end() ? v : it->second;
  };
  Formula g = *f;
  if (!g.var.empty()) g.var = rn(g.var);
  for (auto& v : g.vars) v = rn(v);
  for (auto& v : g.bound_vars) v = rn(v);
  std::vector<FormulaPtr> kids;
  for (const auto& k : g.kids) kids.push_back(subst(k, ren));
  g.kids = std::move(kids);
  return std::make_shared<Formula>(std::move(g));
}

struct FreshNamer {
  int n = 0;
  std::string next() { return "_q" + std::to_string(n++); }
};

FinStructure rename_structure(const FinStructure& s,
                              const std::map<std::string, std::string>& ren) {
  std::vector<std::string> vs;
  for (const auto& nm : s.vertex_names()) {
    auto it = ren.find(nm);
    vs.push_back(it == ren.end() ? nm : it->second);
  }
  std::vector<std::array<std::string, 3>> ts;
  auto r = [&](const std::string& nm) {
    auto it = ren.find(nm);
    return it == ren.end() ? nm : it->second;
  };
  for (const auto& t : s.triples())
    ts.push_back({r(s.name(t.v[0])), r(s.name(t.v[1])), r(s.name(t.v[2]))});
  return FinStructure(std::move(vs), std::move(ts));
}

}  // namespace

std::vector<Amalgam> enumerate_amalgams(const Alpha& a, const FinStructure& ext1,
                                        Mask base1, const FinStructure& ext2,
                                        Mask base2, bool require_intrinsic) {
  auto bn1 = ext1.names_of(base1);
  auto bn2 = ext2.names_of(base2);
  if (bn1 != bn2)
    fail(Errc::precondition, "enumerate_amalgams: bases must share vertex names");
  // identical induced diagrams on the base
  FinStructure b1 = ext1.substructure(base1);
  FinStructure b2 = ext2.substructure(base2);
  if (!(b1 == b2))
    fail(Errc::precondition, "enumerate_amalgams: base diagrams disagree");

  std::vector<std::string> new1, new2;
  for (const auto& nm : ext1.vertex_names())
    if (!b1.has_vertex(nm)) new1.push_back(nm);
  for (const auto& nm : ext2.vertex_names())
    if (!b1.has_vertex(nm)) new2.push_back(nm);
  for (const auto& nm : new2)
    if (ext1.has_vertex(nm))
      fail(Errc::precondition, "enumerate_amalgams: new parts share names");

  std::vector<Amalgam> out;
  std::set<std::string> seen;

  // choose the identified subset of new2 and an injection into new1
  int n2 = static_cast<int>(new2.size());
  for (Mask sel = 0; sel < (Mask{1} << n2); ++sel) {
    std::vector<int> chosen;
    for (int i = 0; i < n2; ++i)
      if (sel & bit(i)) chosen.push_back(i);
    // all injective assignments of chosen positions to new1
    std::vector<int> target(chosen.size(), -1);
    std::function<void(size_t, Mask)> assign = [&](size_t k, Mask used) {
      if (k == chosen.size()) {
        std::map<std::string, std::string> ren;
        for (size_t i = 0; i < chosen.size(); ++i)
          ren[new2[chosen[i]]] = new1[target[i]];
        FinStructure r2 = rename_structure(ext2, ren);
        // joint universe
        std::vector<std::string> joint_names = ext1.vertex_names();
        for (const auto& nm : r2.vertex_names())
          if (!ext1.has_vertex(nm)) joint_names.push_back(nm);
        std::vector<std::array<std::string, 3>> ts;
        auto add = [&](const FinStructure& s) {
          for (const auto& t : s.triples())
            ts.push_back({s.name(t.v[0]), s.name(t.v[1]), s.name(t.v[2])});
        };
        add(ext1);
        add(r2);
        FinStructure core(joint_names, ts);
        // induced consistency: the two parts must appear exactly
        if (!(core.substructure(core.mask_of(ext1.vertex_names())) == ext1) ||
            !(core.substructure(core.mask_of(r2.vertex_names())) == r2))
          return;
        // crossing candidates: touch both pure new parts
        Mask pure1 = 0, pure2 = 0;
        for (const auto& nm : new1)
          if (!r2.has_vertex(nm)) pure1 |= bit(core.index_of(nm));
        for (const auto& nm : r2.vertex_names())
          if (!ext1.has_vertex(nm)) pure2 |= bit(core.index_of(nm));
        std::vector<std::array<int, 3>> cands;
        for (int x = 0; x < core.size(); ++x)
          for (int y = x + 1; y < core.size(); ++y)
            for (int z = y + 1; z < core.size(); ++z) {
              Mask tm = bit(x) | bit(y) | bit(z);
              if ((tm & pure1) && (tm & pure2) && !core.has_triple(x, y, z))
                cands.push_back({x, y, z});
            }
        if (static_cast<int>(cands.size()) > kCrossingCap)
          fail(Errc::unsupported, "enumerate_amalgams: crossing set too large");
        for (Mask cross = 0; cross < (Mask{1} << cands.size()); ++cross) {
          auto ts2 = ts;
          for (size_t ci = 0; ci < cands.size(); ++ci)
            if (cross & bit(static_cast<int>(ci)))
              ts2.push_back({core.name(cands[ci][0]), core.name(cands[ci][1]),
                             core.name(cands[ci][2])});
          FinStructure joint(joint_names, ts2);
          if (!in_class(a, joint, Variant::Strict)) continue;
          Mask jb = joint.mask_of(bn1);
          if (require_intrinsic &&
              !is_intrinsic(a, joint, jb, joint.full_mask(), Variant::Strict))
            continue;
          Amalgam am;
          am.joint = joint;
          am.map1.resize(ext1.size());
          for (int i = 0; i < ext1.size(); ++i)
            am.map1[i] = joint.index_of(ext1.name(i));
          am.map2.resize(ext2.size());
          for (int i = 0; i < ext2.size(); ++i) {
            std::string nm = ext2.name(i);
            auto it = ren.find(nm);
            am.map2[i] = joint.index_of(it == ren.end() ? nm : it->second);
          }
          std::string key = joint.to_json().dump();
          for (int v : am.map2) key += ":" + std::to_string(v);
          if (seen.insert(key).second) out.push_back(std::move(am));
        }
        return;
      }
      for (int t = 0; t < static_cast<int>(new1.size()); ++t) {
        if (used & bit(t)) continue;
        target[k] = t;
        assign(k + 1, used | bit(t));
      }
    };
    assign(0, 0);
  }
  return out;
}

namespace {

bool is_sigma_basic(const FormulaPtr& f) {
  return f->kind == FKind::TrivTrue || f->kind == FKind::TrivFalse ||
         f->kind == FKind::Diag || f->kind == FKind::IntrinsicExists;
}
bool is_pi_basic(const FormulaPtr& f) {
  return f->kind == FKind::TrivTrue || f->kind == FKind::TrivFalse ||
         f->kind == FKind::NegDiag || f->kind == FKind::IntrinsicForall;
}

// named-shape of a guard/atom: vertices renamed to their variables
FinStructure var_named_shape(const FormulaPtr& f) {
  std::map<std::string, std::string> ren;
  for (int i = 0; i < f->shape.size(); ++i) ren[f->shape.name(i)] = f->vars[i];
  return rename_structure(f->shape, ren);
}

std::vector<std::string> base_var_names(const FormulaPtr& f) {
  std::vector<std::string> out;
  for (int i = 0; i < f->shape.size(); ++i)
    if (f->base & bit(i)) out.push_back(f->vars[i]);
  std::sort(out.begin(), out.end());
  return out;
}

// remaps a guarded formula's bound vertices into joint vertices; vmap is
// indexed by the formula's own shape order and lands in joint indices.
std::vector<FormulaPtr> remap_bodies(const FormulaPtr& f,
                                     const std::vector<int>& vmap,
                                     const std::vector<std::string>& joint_vars,
                                     FreshNamer& fresh,
                                     std::vector<std::string>* extra_dummies) {
  std::map<std::string, std::string> ren;
  for (int i = 0; i < f->shape.size(); ++i)
    ren[f->vars[i]] = joint_vars[vmap[i]];
  // dummies of f survive as fresh dummies
  for (const auto& b : f->bound_vars) {
    if (ren.count(b)) continue;
    std::string nd = fresh.next();
    ren[b] = nd;
    if (extra_dummies) extra_dummies->push_back(nd);
  }
  std::vector<FormulaPtr> out;
  for (const auto& k : f->kids) out.push_back(subst(k, ren));
  return out;
}

// formula-shape index -> joint index, going through the var-named copies
std::vector<int> shape_to_joint(const FormulaPtr& f, const FinStructure& named,
                                const std::vector<int>& named_to_joint) {
  std::vector<int> out(f->shape.size());
  for (int i = 0; i < f->shape.size(); ++i)
    out[i] = named_to_joint[named.index_of(f->vars[i])];
  return out;
}

struct GuardParts {
  FinStructure ext;  // named by variables
  Mask base;
};

GuardParts guard_as_vars(const FormulaPtr& f) {
  GuardParts g;
  g.ext = var_named_shape(f);
  std::vector<std::string> bs;
  for (int i = 0; i < f->shape.size(); ++i)
    if (f->base & bit(i)) bs.push_back(f->vars[i]);
  g.base = g.ext.mask_of(bs);
  return g;
}

FormulaPtr conj_sigma(const Alpha& a, const FormulaPtr& f1, const FormulaPtr& f2);

// conjunction of two Sigma-side basics as a disjunction of Sigma-side basics
std::vector<FormulaPtr> conj_sigma_list(const Alpha& a, const FormulaPtr& f1,
                                        const FormulaPtr& f2) {
  FormulaPtr r = conj_sigma(a, f1, f2);
  if (r->kind == FKind::Or) return r->kids;
  return {r};
}

FormulaPtr conj_sigma(const Alpha& a, const FormulaPtr& f1, const FormulaPtr& f2) {
  if (f1->kind == FKind::TrivTrue) return f2;
  if (f2->kind == FKind::TrivTrue) return f1;
  if (f1->kind == FKind::TrivFalse || f2->kind == FKind::TrivFalse)
    return triv_false("x1");

  // promote Diag atoms to degenerate guards (base = everything)
  auto promote = [&](const FormulaPtr& f) -> FormulaPtr {
    if (f->kind != FKind::Diag) return f;
    return f_iexists(f->shape, f->shape.full_mask(), f->vars, {}, {});
  };
  FormulaPtr g1 = promote(f1), g2 = promote(f2);
  if (g1->kind != FKind::IntrinsicExists || g2->kind != FKind::IntrinsicExists)
    fail(Errc::unsupported, "conj_to_canonical: unsupported Sigma-side pair");

  GuardParts p1 = guard_as_vars(g1), p2 = guard_as_vars(g2);
  if (base_var_names(g1) != base_var_names(g2))
    fail(Errc::unsupported,
         "conj_to_canonical: formulas must share their free base tuple");
  // base diagrams must agree, otherwise the conjunction is unsatisfiable
  if (!(p1.ext.substructure(p1.base) == p2.ext.substructure(p2.base)))
    return triv_false("x1");

  // fresh-rename the new part of p2 to avoid collisions
  FreshNamer fresh;
  std::map<std::string, std::string> ren2;
  std::vector<int> orig2(p2.ext.size());
  for (int i = 0; i < p2.ext.size(); ++i) orig2[i] = i;
  {
    std::map<std::string, std::string> r;
    for (int i = 0; i < p2.ext.size(); ++i)
      if (!(p2.base & bit(i)) || p1.ext.has_vertex(p2.ext.name(i))) {
        if (!(p2.base & bit(i)) && p1.ext.has_vertex(p2.ext.name(i)))
          r[p2.ext.name(i)] = fresh.next();
      }
    ren2 = r;
  }
  FinStructure e2 = rename_structure(p2.ext, ren2);
  std::vector<int> back2(e2.size());
  for (int i = 0; i < p2.ext.size(); ++i) {
    std::string nm = p2.ext.name(i);
    auto it = ren2.find(nm);
    back2[i] = e2.index_of(it == ren2.end() ? nm : it->second);
  }

  auto amalgams = enumerate_amalgams(a, p1.ext, p1.base, e2,
                                     e2.mask_of(p1.ext.names_of(p1.base)), true);
  std::vector<FormulaPtr> disjuncts;
  for (const auto& am : amalgams) {
    const FinStructure& joint = am.joint;  // vertices are variable names
    std::vector<std::string> joint_vars = joint.vertex_names();
    Mask jbase = joint.mask_of(p1.ext.names_of(p1.base));
    std::vector<std::string> bound;
    for (int i = 0; i < joint.size(); ++i)
      if (!(jbase & bit(i))) bound.push_back(joint_vars[i]);

    std::vector<std::string> dummies;
    std::vector<int> named_to_joint2(p2.ext.size());
    for (int i = 0; i < p2.ext.size(); ++i)
      named_to_joint2[i] = am.map2[back2[i]];
    auto bodies = remap_bodies(g1, shape_to_joint(g1, p1.ext, am.map1),
                               joint_vars, fresh, &dummies);
    auto extra = remap_bodies(g2, shape_to_joint(g2, p2.ext, named_to_joint2),
                              joint_vars, fresh, &dummies);
    bodies.insert(bodies.end(), extra.begin(), extra.end());
    for (const auto& d : dummies) bound.push_back(d);
    disjuncts.push_back(
        f_iexists(joint, jbase, joint_vars, bound, std::move(bodies)));
  }
  if (disjuncts.empty()) return triv_false("x1");
  if (disjuncts.size() == 1) return disjuncts[0];
  return f_or(std::move(disjuncts));
}

FormulaPtr conj_pi(const Alpha& a, const FormulaPtr& f1, const FormulaPtr& f2,
                   bool displayed_variant) {
  if (f1->kind == FKind::TrivTrue) return f2;
  if (f2->kind == FKind::TrivTrue) return f1;
  if (f1->kind == FKind::TrivFalse || f2->kind == FKind::TrivFalse)
    return triv_false("x1");
  if (f1->kind != FKind::IntrinsicForall || f2->kind != FKind::IntrinsicForall)
    fail(Errc::unsupported, "conj_to_canonical: unsupported Pi-side pair");

  GuardParts p1 = guard_as_vars(f1), p2 = guard_as_vars(f2);
  if (base_var_names(f1) != base_var_names(f2))
    fail(Errc::unsupported,
         "conj_to_canonical: formulas must share their free base tuple");
  bool bases_match = p1.ext.substructure(p1.base) == p2.ext.substructure(p2.base);
  if (!bases_match) {
    // adopted from the source result as stated; the suite re-checks this
    // equivalence on the corpus and reports violations as findings
    return f_or({f1, f2});
  }

  auto no_copy = [&](const FormulaPtr& f) {
    return f_iforall(f->shape, f->base, f->vars, f->bound_vars, {});
  };
  auto some_copy = [&](const FormulaPtr& f) {
    return f_iexists(f->shape, f->base, f->vars, f->bound_vars, {});
  };
  FormulaPtr phi1p = no_copy(f1), phi2p = no_copy(f2);

  FreshNamer fresh;
  std::map<std::string, std::string> ren2;
  for (int i = 0; i < p2.ext.size(); ++i)
    if (!(p2.base & bit(i)) && p1.ext.has_vertex(p2.ext.name(i)))
      ren2[p2.ext.name(i)] = fresh.next();
  FinStructure e2 = rename_structure(p2.ext, ren2);
  std::vector<int> back2(p2.ext.size());
  for (int i = 0; i < p2.ext.size(); ++i) {
    std::string nm = p2.ext.name(i);
    auto it = ren2.find(nm);
    back2[i] = e2.index_of(it == ren2.end() ? nm : it->second);
  }

  auto amalgams = enumerate_amalgams(a, p1.ext, p1.base, e2,
                                     e2.mask_of(p1.ext.names_of(p1.base)), true);
  std::vector<FormulaPtr> chis;
  for (const auto& am : amalgams) {
    const FinStructure& joint = am.joint;
    std::vector<std::string> joint_vars = joint.vertex_names();
    Mask jbase = joint.mask_of(p1.ext.names_of(p1.base));
    std::vector<std::string> bound;
    for (int i = 0; i < joint.size(); ++i)
      if (!(jbase & bit(i))) bound.push_back(joint_vars[i]);
    std::vector<std::string> dummies;
    std::vector<int> named_to_joint2(p2.ext.size());
    for (int i = 0; i < p2.ext.size(); ++i)
      named_to_joint2[i] = am.map2[back2[i]];
    auto b1 = remap_bodies(f1, shape_to_joint(f1, p1.ext, am.map1), joint_vars,
                           fresh, &dummies);
    auto b2 = remap_bodies(f2, shape_to_joint(f2, p2.ext, named_to_joint2),
                           joint_vars, fresh, &dummies);
    for (const auto& d : dummies) bound.push_back(d);
    // body: (\/ b1) ∧ (\/ b2) distributed into Sigma-side disjuncts
    std::vector<FormulaPtr> body;
    for (const auto& t1 : b1)
      for (const auto& t2 : b2)
        for (auto& piece : conj_sigma_list(a, t1, t2)) body.push_back(piece);
    chis.push_back(f_iforall(joint, jbase, joint_vars, bound, std::move(body)));
  }

  FormulaPtr d1 = f_and({f1, phi2p});
  FormulaPtr d2 = f_and({f2, phi1p});
  if (displayed_variant) {
    std::vector<FormulaPtr> ds{d1, d2};
    for (auto& c : chis) ds.push_back(c);
    return f_or(std::move(ds));
  }
  std::vector<FormulaPtr> joint_branch{some_copy(f1), some_copy(f2)};
  for (auto& c : chis) joint_branch.push_back(c);
  return f_or({d1, d2, f_and(std::move(joint_branch))});
}

}  // namespace

FormulaPtr conj_to_canonical(const Alpha& a, const FormulaPtr& f1,
                             const FormulaPtr& f2) {
  if (!is_basic(f1) || !is_basic(f2))
    fail(Errc::precondition, "conj_to_canonical: inputs must be basic");
  if (is_sigma_basic(f1) && is_sigma_basic(f2)) return conj_sigma(a, f1, f2);
  if (is_pi_basic(f1) && is_pi_basic(f2)) return conj_pi(a, f1, f2, false);
  fail(Errc::unsupported,
       "conj_to_canonical: mixed Sigma/Pi conjunctions are out of scope");
}

FormulaPtr conj_to_canonical_displayed(const Alpha& a, const FormulaPtr& f1,
                                       const FormulaPtr& f2) {
  if (!is_basic(f1) || !is_basic(f2))
    fail(Errc::precondition, "conj_to_canonical: inputs must be basic");
  if (is_pi_basic(f1) && is_pi_basic(f2)) return conj_pi(a, f1, f2, true);
  return conj_to_canonical(a, f1, f2);
}

FormulaPtr implication_to_pc(const Alpha& a, const FormulaPtr& phi_qf,
                             const FinStructure& guard, Mask base,
                             const std::vector<std::string>& guard_vars,
                             const std::vector<std::string>& bound_vars,
                             const std::vector<FormulaPtr>& psis) {
  // extra free variables of phi beyond the guard tuple
  std::set<std::string> gv(guard_vars.begin(), guard_vars.end());
  std::vector<std::string> extra;
  for (const auto& v : phi_qf->free_vars())
    if (!gv.count(v)) extra.push_back(v);

  // guard shape renamed so vertices are variables, extra vars appended
  std::map<std::string, std::string> ren;
  for (int i = 0; i < guard.size(); ++i) ren[guard.name(i)] = guard_vars[i];
  FinStructure gshape = rename_structure(guard, ren);
  std::vector<std::string> all_names = gshape.vertex_names();
  for (const auto& v : extra) all_names.push_back(v);

  std::vector<std::array<int, 3>> cands;
  {
    FinStructure shell(all_names, {});
    Mask extra_mask = 0;
    for (const auto& v : extra) extra_mask |= bit(shell.index_of(v));
    for (int x = 0; x < shell.size(); ++x)
      for (int y = x + 1; y < shell.size(); ++y)
        for (int z = y + 1; z < shell.size(); ++z)
          if ((bit(x) | bit(y) | bit(z)) & extra_mask) cands.push_back({x, y, z});
  }
  if (static_cast<int>(cands.size()) > 16)
    fail(Errc::unsupported, "implication_to_pc: diagram space too large");

  std::vector<FormulaPtr> bodies;
  FinStructure shell(all_names, {});
  std::vector<std::array<std::string, 3>> base_ts;
  for (const auto& t : gshape.triples())
    base_ts.push_back({gshape.name(t.v[0]), gshape.name(t.v[1]), gshape.name(t.v[2])});
  for (Mask sel = 0; sel < (Mask{1} << cands.size()); ++sel) {
    auto ts = base_ts;
    for (size_t i = 0; i < cands.size(); ++i)
      if (sel & bit(static_cast<int>(i)))
        ts.push_back({shell.name(cands[i][0]), shell.name(cands[i][1]),
                      shell.name(cands[i][2])});
    FinStructure d(all_names, ts);
    // complete diagrams on which phi fails
    Assignment ident;
    for (int i = 0; i < d.size(); ++i) ident[d.name(i)] = i;
    if (eval_fo(d, phi_qf, ident)) continue;
    if (!in_class(a, d, Variant::Strict)) continue;
    bodies.push_back(f_diag(d, d.vertex_names()));
  }
  for (const auto& p : psis) bodies.push_back(p);
  return f_iforall(guard, base, guard_vars, bound_vars, std::move(bodies));
}

namespace {

struct Reducer {
  const Alpha& a;
  FreshNamer fresh;

  // reduce one basic (or bounded) formula to primary disjuncts
  bool reduce_basic(const FormulaPtr& f, std::vector<FormulaPtr>& out,
                    std::string& diag) {
    switch (f->kind) {
      case FKind::TrivTrue:
      case FKind::TrivFalse:
      case FKind::Diag:
        out.push_back(f);
        return true;
      case FKind::NegDiag: {
        // all other class diagrams on the same tuple (injective convention)
        int n = static_cast<int>(f->vars.size());
        FinStructure shell(f->vars, {});
        std::vector<std::array<int, 3>> pool;
        for (int x = 0; x < n; ++x)
          for (int y = x + 1; y < n; ++y)
            for (int z = y + 1; z < n; ++z) pool.push_back({x, y, z});
        if (pool.size() > 16) {
          diag = "negated diagram over too many variables";
          return false;
        }
        std::map<std::string, std::string> ren;
        for (int i = 0; i < f->shape.size(); ++i) ren[f->shape.name(i)] = f->vars[i];
        FinStructure target = rename_structure(f->shape, ren);
        for (Mask sel = 0; sel < (Mask{1} << pool.size()); ++sel) {
          std::vector<std::array<std::string, 3>> ts;
          for (size_t i = 0; i < pool.size(); ++i)
            if (sel & bit(static_cast<int>(i)))
              ts.push_back({shell.name(pool[i][0]), shell.name(pool[i][1]),
                            shell.name(pool[i][2])});
          FinStructure d(f->vars, ts);
          if (d == target) continue;
          if (!in_class(a, d, Variant::Strict)) continue;
          out.push_back(f_diag(d, d.vertex_names()));
        }
        return true;
      }
      case FKind::IntrinsicExists:
      case FKind::BoundedExists: {
        if (is_primary(f, a)) {
          out.push_back(f);
          return true;
        }
        // bodies are Pi-side; reduce the non-primary forall levels
        for (const auto& k : f->kids) {
          if (!is_primary(k, a)) {
            if (!body_reducible(k, diag)) return false;
          }
        }
        std::vector<FormulaPtr> kids;
        for (const auto& k : f->kids) {
          FormulaPtr rk = reduce_forall(k, diag);
          if (!rk) return false;
          kids.push_back(rk);
        }
        Formula g = *f;
        g.kids = std::move(kids);
        out.push_back(std::make_shared<Formula>(std::move(g)));
        return true;
      }
      case FKind::IntrinsicForall: {
        FormulaPtr r = reduce_forall(f, diag);
        if (!r) return false;
        out.push_back(r);
        return true;
      }
      default:
        diag = "not a basic closure formula";
        return false;
    }
  }

  bool body_reducible(const FormulaPtr& k, std::string& diag) {
    if (k->kind == FKind::IntrinsicForall) return true;  // handled by reduce
    diag = "non-primary body of unsupported kind";
    return false;
  }

  // A forall level: already primary stays; a non-strong base goes through
  // the bounded-exists route with the closure anchor; a non-strong body
  // guard is reported non-reducible.
  FormulaPtr reduce_forall(const FormulaPtr& f, std::string& diag) {
    if (f->kind != FKind::IntrinsicForall) {
      if (is_primary(f, a)) return f;
      diag = "body is not primary";
      return nullptr;
    }
    // body guards must extend this guard's extension strongly (for levels
    // with guarded bodies)
    for (const auto& k : f->kids) {
      if (k->kind == FKind::IntrinsicExists || k->kind == FKind::BoundedExists) {
        if (!is_strong(a, k->shape, k->base, k->shape.full_mask(),
                       Variant::NonStrict)) {
          diag =
              "body guard is not a strong extension (the anchored reduction "
              "for this case is outside the supported fragment)";
          return nullptr;
        }
      }
    }
    if (is_strong(a, f->shape, f->base, f->shape.full_mask(), Variant::NonStrict))
      return f;  // primary at this level

    // base not strong: anchor the non-strict closure of the base
    Mask b1 = closure_mask(a, f->shape, f->base, Variant::NonStrict);
    if (b1 == f->base || (b1 & ~f->shape.full_mask())) {
      diag = "closure anchor degenerate";
      return nullptr;
    }
    FinStructure b1_struct = f->shape.substructure(b1);
    long long eta = mu_eta(a, f->shape, f->base, b1);

    // outer: exists^{<=eta} for the anchor (vars of B1 \ A fresh-bound)
    std::vector<std::string> outer_vars(f->shape.size());
    std::vector<std::string> outer_bound;
    for (int i = 0; i < f->shape.size(); ++i) {
      outer_vars[i] = f->vars[i];
      if (!(f->base & bit(i)) && (b1 & bit(i))) outer_bound.push_back(f->vars[i]);
    }
    // inner: forall over the remaining part, guard base = B1
    std::vector<std::string> inner_bound;
    for (int i = 0; i < f->shape.size(); ++i)
      if (!(b1 & bit(i))) inner_bound.push_back(f->vars[i]);
    // dummies of the original quantifier stay with the inner level
    std::set<std::string> vertex_vars(f->vars.begin(), f->vars.end());
    for (const auto& d : f->bound_vars)
      if (!vertex_vars.count(d)) inner_bound.push_back(d);

    FormulaPtr inner =
        f_iforall(f->shape, b1, f->vars, inner_bound, f->kids);
    // the inner level may itself need reduction of its bodies
    std::string d2;
    FormulaPtr inner_red = reduce_forall(inner, d2);
    if (!inner_red) {
      diag = d2;
      return nullptr;
    }
    FinStructure outer_shape = b1_struct;
    std::vector<std::string> ovars;
    for (int i = 0; i < f->shape.size(); ++i)
      if (b1 & bit(i)) ovars.push_back(f->vars[i]);
    Mask obase = 0;
    {
      int k = 0;
      for (int i = 0; i < f->shape.size(); ++i) {
        if (!(b1 & bit(i))) continue;
        if (f->base & bit(i)) obase |= bit(k);
        ++k;
      }
    }
    return f_bexists(eta, outer_shape, obase, ovars, outer_bound, {inner_red});
  }
};

}  // namespace

PrimaryResult to_primary_disjunction(const Alpha& a, const FormulaPtr& f) {
  PrimaryResult res;
  LevelInfo info = level_of(f, a);
  if (info.fo_only) {
    res.diagnostic = "general first-order input";
    return res;
  }
  if (!info.guard_violations.empty()) {
    res.diagnostic = "guard invalid at this alpha: " + info.guard_violations[0];
    return res;
  }

  // flatten to a disjunction of units
  std::vector<FormulaPtr> units;
  std::function<bool(const FormulaPtr&)> flatten = [&](const FormulaPtr& g) {
    if (g->kind == FKind::Or) {
      for (const auto& k : g->kids)
        if (!flatten(k)) return false;
      return true;
    }
    if (g->kind == FKind::And) {
      // supported: conjunction of Sigma-side basics (canonical-form route)
      std::vector<FormulaPtr> parts;
      for (const auto& k : g->kids) {
        if (!is_sigma_basic(k)) {
          res.diagnostic =
              "conjunction with a non-Sigma-side member is outside the "
              "supported reduction fragment";
          return false;
        }
        parts.push_back(k);
      }
      if (parts.empty()) {
        units.push_back(triv_true("x1"));
        return true;
      }
      std::vector<FormulaPtr> acc{parts[0]};
      for (size_t i = 1; i < parts.size(); ++i) {
        std::vector<FormulaPtr> next;
        for (const auto& d : acc)
          for (auto& piece : {conj_to_canonical(a, d, parts[i])}) {
            if (piece->kind == FKind::Or)
              next.insert(next.end(), piece->kids.begin(), piece->kids.end());
            else
              next.push_back(piece);
          }
        acc = std::move(next);
      }
      for (auto& d : acc) units.push_back(d);
      return true;
    }
    units.push_back(g);
    return true;
  };
  if (!flatten(f)) return res;

  Reducer red{a};
  for (const auto& u : units) {
    std::string diag;
    if (!red.reduce_basic(u, res.disjuncts, diag)) {
      res.diagnostic = diag;
      res.disjuncts.clear();
      return res;
    }
  }
  // every output must be primary
  for (const auto& d : res.disjuncts) {
    if (!is_primary(d, a)) {
      res.diagnostic = "internal: produced a non-primary disjunct";
      res.disjuncts.clear();
      return res;
    }
  }
  res.reduced = true;
  return res;
}

CorpusCounterexample equivalent_on_corpus_injective(
    const Alpha& a, const FormulaPtr& f1, const FormulaPtr& f2,
    const std::vector<FinStructure>& corpus) {
  std::set<std::string> fv;
  for (auto& v : f1->free_vars()) fv.insert(v);
  for (auto& v : f2->free_vars()) fv.insert(v);
  std::vector<std::string> vars(fv.begin(), fv.end());
  CorpusCounterexample res;
  for (const auto& m : corpus) {
    const int n = m.size();
    if (n < static_cast<int>(vars.size())) continue;
    std::vector<int> tuple;
    std::function<bool(size_t)> rec = [&](size_t k) {
      if (k == vars.size()) {
        Assignment asg;
        for (size_t i = 0; i < vars.size(); ++i) asg[vars[i]] = tuple[i];
        bool b1 = eval_closure(a, m, f1, asg);
        bool b2 = eval_closure(a, m, f2, asg);
        if (b1 != b2) {
          res.equal = false;
          res.model = m;
          res.assignment = asg;
          return true;
        }
        return false;
      }
      for (int v = 0; v < n; ++v) {
        if (std::find(tuple.begin(), tuple.end(), v) != tuple.end()) continue;
        tuple.push_back(v);
        if (rec(k + 1)) return true;
        tuple.pop_back();
      }
      return false;
    };
    if (rec(0)) return res;
  }
  return res;
}

}  // namespace predimlab
