#include "qe.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace predimlab {

namespace {

FinStructure rename_struct(const FinStructure& s,
                           const std::map<std::string, std::string>& ren) {
  std::vector<std::string> vs;
  auto r = [&](const std::string& nm) {
    auto it = ren.find(nm);
    return it == ren.end() ? nm : it->second;
  };
  for (const auto& nm : s.vertex_names()) vs.push_back(r(nm));
  std::vector<std::array<std::string, 3>> ts;
  for (const auto& t : s.triples())
    ts.push_back({r(s.name(t.v[0])), r(s.name(t.v[1])), r(s.name(t.v[2]))});
  return FinStructure(std::move(vs), std::move(ts));
}

}  // namespace

std::vector<CoreGadget> negative_core(const Alpha& a, const FinStructure& c,
                                      const std::vector<std::string>& e_names,
                                      const FinStructure& d) {
  Mask e_in_c = c.mask_of(e_names);
  Mask e_in_d = d.mask_of(e_names);
  FinStructure e_struct = c.substructure(e_in_c);
  if (!(d.substructure(e_in_d) == e_struct))
    fail(Errc::precondition, "negative_core: E disagrees between C and D");
  if (!is_intrinsic(a, d, e_in_d, d.full_mask(), Variant::Strict))
    fail(Errc::precondition, "negative_core: D is not intrinsic over E");
  if (!is_strong(a, d, e_in_d, d.full_mask(), Variant::NonStrict))
    fail(Errc::precondition, "negative_core: E is not strong in D");
  if (!is_strong(a, c, e_in_c, c.full_mask(), Variant::Strict) &&
      !(c.full_mask() == e_in_c))
    fail(Errc::precondition, "negative_core: E is not strictly strong in C");

  // non-free ways a copy of D over E can meet C
  auto amalgams = enumerate_amalgams(a, c, e_in_c, d, e_in_d, false);
  std::vector<CoreGadget> out;
  std::set<std::string> seen;
  for (const auto& am : amalgams) {
    // the D-part inside the joint
    Mask dmask = 0;
    for (int i = 0; i < d.size(); ++i) dmask |= bit(am.map2[i]);
    Mask cmask = 0;
    for (int i = 0; i < c.size(); ++i) cmask |= bit(am.map1[i]);
    Mask emask = am.joint.mask_of(e_names);
    bool shares = (dmask & cmask & ~emask) != 0;
    bool crossing = false;
    for (const auto& t : am.joint.triples())
      if ((t.mask & (dmask & ~emask)) && (t.mask & (cmask & ~emask)))
        crossing = true;
    if (!shares && !crossing) continue;  // free: not an interaction type

    // dedup by isomorphism type of the joint over C
    std::string key = am.joint.canonical_form();
    if (!seen.insert(key).second) continue;

    CoreGadget g;
    g.interaction = am.joint;
    g.gadget = d;  // one copy of D over E signals this interaction
    // closure trace: cl(D-part) \ C inside the joint
    Mask cl_d = closure_mask(a, am.joint, dmask, Variant::NonStrict);
    g.trace = am.joint.names_of(cl_d & ~cmask);

    // freeness detector: joint diagrams of (gadget, fresh D-copy) over E in
    // which the copy's overlap with the gadget is not the recorded trace
    std::map<std::string, std::string> ren;
    int fresh_i = 0;
    for (const auto& nm : d.vertex_names())
      if (std::find(e_names.begin(), e_names.end(), nm) == e_names.end())
        ren[nm] = "wc" + std::to_string(fresh_i++);
    FinStructure d2 = rename_struct(d, ren);
    auto joints = enumerate_amalgams(a, d, d.mask_of(e_names), d2,
                                     d2.mask_of(e_names), false);
    // variables: E -> x_i, gadget-new -> v_i, D-copy-new -> w_i
    std::map<std::string, std::string> var_of;
    for (size_t i = 0; i < e_names.size(); ++i) {
      var_of[e_names[i]] = "x" + std::to_string(i + 1);
      g.e_vars.push_back(var_of[e_names[i]]);
    }
    int vi = 0;
    for (const auto& nm : d.vertex_names())
      if (!var_of.count(nm)) {
        var_of[nm] = "v" + std::to_string(++vi);
        g.v_vars.push_back(var_of[nm]);
      }
    int wi = 0;
    for (const auto& nm : d2.vertex_names())
      if (!var_of.count(nm)) {
        var_of[nm] = "w" + std::to_string(++wi);
        g.w_vars.push_back(var_of[nm]);
      }
    std::vector<FormulaPtr> detect;
    for (const auto& j : joints) {
      Mask jd = 0;
      for (int i = 0; i < d2.size(); ++i) jd |= bit(j.map2[i]);
      Mask jg = 0;
      for (int i = 0; i < d.size(); ++i) jg |= bit(j.map1[i]);
      Mask je = j.joint.mask_of(e_names);
      std::vector<std::string> overlap = j.joint.names_of(jd & jg & ~je);
      std::sort(overlap.begin(), overlap.end());
      std::vector<std::string> trace_sorted = g.trace;
      std::sort(trace_sorted.begin(), trace_sorted.end());
      if (!overlap.empty() && overlap == trace_sorted) continue;  // in H_s
      std::map<std::string, std::string> jren;
      for (const auto& nm : j.joint.vertex_names()) {
        auto it = var_of.find(nm);
        if (it == var_of.end())
          fail(Errc::invalid_argument, "negative_core: unnamed joint vertex");
        jren[nm] = it->second;
      }
      FinStructure shape = rename_struct(j.joint, jren);
      detect.push_back(f_diag(shape, shape.vertex_names()));
    }
    g.phi = detect.empty()  ? triv_false("x1")
            : detect.size() == 1 ? detect[0]
                                 : f_or(std::move(detect));
    out.push_back(std::move(g));
  }
  return out;
}

namespace {

// Folds a Sigma/Pi-side atom against a fully pinned guard pattern: every
// variable of the atom names a vertex of `pattern`.  Returns +1 / -1 for
// definite truth values, 0 when a variable is outside the pattern.
int fold_atom(const FormulaPtr& atom, const FinStructure& pattern,
              const std::map<std::string, int>& vertex_of_var) {
  if (atom->kind == FKind::TrivTrue) return 1;
  if (atom->kind == FKind::TrivFalse) return -1;
  if (atom->kind != FKind::Diag && atom->kind != FKind::NegDiag) return 0;
  std::vector<int> tuple;
  for (const auto& v : atom->vars) {
    auto it = vertex_of_var.find(v);
    if (it == vertex_of_var.end()) return 0;
    tuple.push_back(it->second);
  }
  // complete diagram of the atom shape against the pattern's induced triples
  bool holds = true;
  std::set<int> distinct(tuple.begin(), tuple.end());
  if (distinct.size() != tuple.size()) holds = false;
  for (int x = 0; x < atom->shape.size() && holds; ++x)
    for (int y = x + 1; y < atom->shape.size() && holds; ++y)
      for (int z = y + 1; z < atom->shape.size() && holds; ++z)
        if (atom->shape.has_triple(x, y, z) !=
            pattern.has_triple(tuple[x], tuple[y], tuple[z]))
          holds = false;
  bool value = atom->kind == FKind::Diag ? holds : !holds;
  return value ? 1 : -1;
}

struct GuardView {
  FinStructure shape;                     // vertices named by variables
  std::map<std::string, int> vertex_of;   // variable -> vertex index
};

GuardView view_of(const FormulaPtr& f) {
  GuardView v;
  std::map<std::string, std::string> ren;
  for (int i = 0; i < f->shape.size(); ++i) ren[f->shape.name(i)] = f->vars[i];
  v.shape = rename_struct(f->shape, ren);
  for (int i = 0; i < v.shape.size(); ++i) v.vertex_of[v.shape.name(i)] = i;
  return v;
}

std::string fresh_var(int& k) { return "z" + std::to_string(++k); }

}  // namespace

FormulaPtr phi_for_exists(const Alpha& a, const FormulaPtr& psi,
                          const std::vector<std::string>& xvars) {
  if (psi->kind == FKind::Or) {
    std::vector<FormulaPtr> parts;
    for (const auto& k : psi->kids) parts.push_back(phi_for_exists(a, k, xvars));
    return f_or(std::move(parts));
  }
  if (psi->kind == FKind::TrivTrue || psi->kind == FKind::TrivFalse) return psi;

  std::set<std::string> xs(xvars.begin(), xvars.end());

  // ---- depth 0: a plain diagram atom ----
  if (psi->kind == FKind::Diag) {
    GuardView v = view_of(psi);
    std::vector<std::string> akeep;
    for (const auto& nm : v.shape.vertex_names())
      if (xs.count(nm)) akeep.push_back(nm);
    Mask amask = v.shape.mask_of(akeep);
    Mask emask = closure_mask(a, v.shape, amask, Variant::Strict);
    FinStructure e_struct = v.shape.substructure(emask);
    // guard (A, E) with fresh bound names for E \ A
    int zc = 0;
    std::map<std::string, std::string> ren;
    std::vector<std::string> bound;
    for (const auto& nm : e_struct.vertex_names())
      if (!xs.count(nm)) {
        ren[nm] = fresh_var(zc);
        bound.push_back(ren[nm]);
      }
    FinStructure eshape = rename_struct(e_struct, ren);
    return f_iexists(eshape, eshape.mask_of(akeep), eshape.vertex_names(),
                     bound, {});
  }

  if (psi->kind != FKind::IntrinsicExists)
    fail(Errc::unsupported,
         "phi_for_exists: depth not supported (expected a primary "
         "Sigma-side formula, got kind " +
             std::to_string(static_cast<int>(psi->kind)) + ")");

  // ---- guarded existential: fold bodies, split old/new, emit theta ----
  GuardView cv = view_of(psi);
  const FinStructure& cshape = cv.shape;

  struct Negative {
    FormulaPtr body;  // the original Pc body (guard over cshape)
  };
  std::vector<FormulaPtr> negatives;  // kept: forall -> bottom after folding
  struct PositiveForall {
    FormulaPtr body;
    std::vector<FormulaPtr> kept_exists;  // surviving Sigma bodies
  };
  std::vector<PositiveForall> positives;

  for (const auto& body : psi->kids) {
    int v = fold_atom(body, cshape, cv.vertex_of);
    if (v == 1) continue;  // structurally true: drop
    if (v == -1) return triv_false("x1");  // unsatisfiable with the guard
    if (body->kind != FKind::IntrinsicForall)
      fail(Errc::unsupported, "phi_for_exists: depth not supported (body)");
    // fold the forall's Sigma-side bodies against its own guard pattern
    GuardView dv = view_of(body);
    std::vector<FormulaPtr> kept;
    bool trivially_true = false;
    for (const auto& inner : body->kids) {
      int iv = fold_atom(inner, dv.shape, dv.vertex_of);
      if (iv == 1) {
        trivially_true = true;
        break;
      }
      if (iv == -1) continue;  // impossible disjunct: drop
      if (inner->kind == FKind::IntrinsicExists) {
        kept.push_back(inner);
        continue;
      }
      fail(Errc::unsupported, "phi_for_exists: depth not supported (inner)");
    }
    if (trivially_true) continue;  // body always satisfied: drop
    if (kept.empty())
      negatives.push_back(body);
    else
      positives.push_back(PositiveForall{body, kept});
  }

  // base split: A = x-part of the guard base; E = cl*_C(A)
  std::vector<std::string> akeep;
  for (const auto& nm : cshape.vertex_names())
    if (xs.count(nm)) akeep.push_back(nm);
  Mask amask = cshape.mask_of(akeep);
  Mask emask = closure_mask(a, cshape, amask, Variant::Strict);
  Mask cprime = cshape.full_mask() & ~emask;

  // anchor guard (A, E), fresh bound names
  int zc = 0;
  std::map<std::string, std::string> eren;
  std::vector<std::string> ebound;
  FinStructure e_struct = cshape.substructure(emask);
  for (const auto& nm : e_struct.vertex_names())
    if (!xs.count(nm)) {
      eren[nm] = fresh_var(zc);
      ebound.push_back(eren[nm]);
    }
  FinStructure eshape = rename_struct(e_struct, eren);

  std::vector<FormulaPtr> theta_bodies;

  auto rebased_guard = [&](const FormulaPtr& body, std::vector<FormulaPtr> inner)
      -> FormulaPtr {
    // the body's guard extension D over base C, rebased over the anchor E:
    // D's vertices = cshape's (renamed via eren on the E part) plus fresh
    GuardView dv = view_of(body);
    int wc = 0;
    std::map<std::string, std::string> dren = eren;
    std::vector<std::string> dbound;
    for (const auto& nm : dv.shape.vertex_names()) {
      if (e_struct.has_vertex(nm)) continue;
      dren[nm] = "w" + std::to_string(++wc) + "_" + std::to_string(zc);
      dbound.push_back(dren[nm]);
    }
    FinStructure dshape = rename_struct(dv.shape, dren);
    // inner formulas renamed the same way
    std::map<std::string, std::string> var_ren;
    for (const auto& [from, to] : dren) var_ren[from] = to;
    std::vector<FormulaPtr> inner_renamed;
    for (const auto& g : inner) {
      // substitute variable names occurring in the inner formulas
      std::function<FormulaPtr(const FormulaPtr&)> sub =
          [&](const FormulaPtr& h) -> FormulaPtr {
        Formula g2 = *h;
        auto rn = [&](const std::string& s) {
          auto it = var_ren.find(s);
          return it == var_ren.end() ? s : it->second;
        };
        if (!g2.var.empty()) g2.var = rn(g2.var);
        for (auto& vv : g2.vars) vv = rn(vv);
        for (auto& vv : g2.bound_vars) vv = rn(vv);
        std::vector<FormulaPtr> kids;
        for (const auto& kk : g2.kids) kids.push_back(sub(kk));
        g2.kids = std::move(kids);
        return std::make_shared<Formula>(std::move(g2));
      };
      inner_renamed.push_back(sub(g));
    }
    Mask dbase = dshape.mask_of(eshape.vertex_names());
    return f_iforall(dshape, dbase, dshape.vertex_names(), dbound,
                     std::move(inner_renamed));
  };

  for (const auto& neg : negatives) {
    // old/new over (E, C') inside the body's guard shape
    GuardView dv = view_of(neg);
    Mask e_in_d = dv.shape.mask_of(e_struct.vertex_names());
    Mask cprime_in_d = dv.shape.mask_of(cshape.names_of(cprime));
    OldNew on = classify_old_new(a, dv.shape, e_in_d, e_in_d | cprime_in_d,
                                 dv.shape.full_mask(), Variant::Strict);
    if (on == OldNew::New) continue;  // unsatisfiable over an old embedding
    theta_bodies.push_back(rebased_guard(neg, {}));
  }

  for (const auto& pos : positives) {
    GuardView dv = view_of(pos.body);
    Mask e_in_d = dv.shape.mask_of(e_struct.vertex_names());
    Mask cprime_in_d = dv.shape.mask_of(cshape.names_of(cprime));
    OldNew on = classify_old_new(a, dv.shape, e_in_d, e_in_d | cprime_in_d,
                                 dv.shape.full_mask(), Variant::Strict);
    if (on == OldNew::New) continue;  // Case 1: drop the positive level
    // Case 2 (supported when the anchor already swallows C'): replace each
    // continuation C_0k by its closure over D_0 and keep the level
    if (cprime != 0)
      fail(Errc::unsupported,
           "phi_for_exists: depth not supported (old positive level with a "
           "nonempty zero tail needs the anchored core construction)");
    std::vector<FormulaPtr> conts;
    for (const auto& inner : pos.kept_exists) {
      GuardView kv = view_of(inner);
      // base of the continuation guard: the D_0 pattern
      Mask d0 = kv.shape.mask_of(dv.shape.vertex_names());
      Mask e0k = closure_mask(a, kv.shape, d0, Variant::Strict);
      FinStructure e0 = kv.shape.substructure(e0k);
      int uc = 0;
      std::map<std::string, std::string> uren;
      std::vector<std::string> ubound;
      for (const auto& nm : e0.vertex_names())
        if (!dv.shape.has_vertex(nm)) {
          uren[nm] = "u" + std::to_string(++uc) + "_" + std::to_string(zc);
          ubound.push_back(uren[nm]);
        }
      FinStructure e0shape = rename_struct(e0, uren);
      conts.push_back(f_iexists(e0shape,
                                e0shape.mask_of(dv.shape.vertex_names()),
                                e0shape.vertex_names(), ubound, {}));
    }
    theta_bodies.push_back(rebased_guard(pos.body, std::move(conts)));
  }

  return f_iexists(eshape, eshape.mask_of(akeep), eshape.vertex_names(), ebound,
                   std::move(theta_bodies));
}

Companion companion_structure(const Alpha& a, const FinStructure& m,
                              const std::map<std::string, std::string>& abar,
                              const FormulaPtr& psi,
                              const std::vector<std::string>& xvars) {
  FormulaPtr phi = phi_for_exists(a, psi, xvars);
  Assignment asg;
  for (const auto& [var, vertex] : abar) {
    int ix = m.index_of(vertex);
    if (ix < 0) fail(Errc::invalid_argument, "companion: unknown vertex");
    asg[var] = ix;
  }
  if (!eval_closure(a, m, phi, asg))
    fail(Errc::precondition, "companion: Phi_psi does not hold at the tuple");

  Mask am = 0;
  for (const auto& [var, vertex] : abar) am |= bit(m.index_of(vertex));
  Mask k = closure_mask(a, m, am, Variant::Strict);
  FinStructure kstruct = m.substructure(k);

  Companion comp;
  comp.closure = kstruct;

  // locate psi's guard data again
  if (psi->kind == FKind::Or) {
    for (const auto& kid : psi->kids) {
      FormulaPtr kphi = phi_for_exists(a, kid, xvars);
      if (eval_closure(a, m, kphi, asg))
        return companion_structure(a, m, abar, kid, xvars);
    }
    fail(Errc::precondition, "companion: no satisfied disjunct");
  }
  if (psi->kind != FKind::Diag && psi->kind != FKind::IntrinsicExists)
    fail(Errc::unsupported, "companion: unsupported psi");

  GuardView cv = view_of(psi);
  std::set<std::string> xs(xvars.begin(), xvars.end());
  std::vector<std::string> akeep;
  for (const auto& nm : cv.shape.vertex_names())
    if (xs.count(nm)) akeep.push_back(nm);
  Mask amask = cv.shape.mask_of(akeep);
  Mask emask = closure_mask(a, cv.shape, amask, Variant::Strict);
  FinStructure e_struct = cv.shape.substructure(emask);

  // anchor: a copy of E over abar inside the closure that satisfies the
  // emitted theta bodies; phi holding guarantees one exists in m, and every
  // intrinsic copy lies inside the closure
  std::vector<int> anchor(e_struct.size(), -1);
  for (int i = 0; i < e_struct.size(); ++i) {
    const std::string& nm = e_struct.name(i);
    if (xs.count(nm)) anchor[i] = m.index_of(abar.at(nm));
  }
  auto anchors = enumerate_embeddings(m, e_struct, anchor);
  // re-evaluate phi's bodies per anchor by rebuilding the assignment
  FormulaPtr probe = phi;  // iexists over eshape
  std::vector<int> chosen;
  for (const auto& cand : anchors) {
    // bind the anchor's variables and check the emitted theta bodies;
    // the fresh z-names are regenerated exactly as phi_for_exists does
    // (same iteration order over e_struct)
    Assignment ext = asg;
    bool ok = true;
    std::map<std::string, std::string> fwd;
    {
      int zc = 0;
      for (const auto& nm : e_struct.vertex_names())
        if (!xs.count(nm)) fwd[nm] = "z" + std::to_string(++zc);
    }
    for (int i = 0; i < e_struct.size(); ++i) {
      const std::string& nm = e_struct.name(i);
      std::string var = xs.count(nm) ? nm : fwd[nm];
      ext[var] = cand[i];
    }
    ok = true;
    for (const auto& body : probe->kids)
      if (!eval_closure(a, m, body, ext)) {
        ok = false;
        break;
      }
    if (ok) {
      chosen = cand;
      break;
    }
  }
  if (chosen.empty() && e_struct.size() > 0)
    fail(Errc::precondition, "companion: no anchored witness (unexpected)");

  // fresh parts: C \ E glued over the anchor following C's diagram
  auto fresh_name = [&](int i) { return "f" + std::to_string(i); };
  std::map<std::string, std::string> place;  // cshape vertex -> glued name
  for (int i = 0; i < e_struct.size(); ++i)
    place[e_struct.name(i)] = m.name(chosen[i]);
  int fi = 0;
  std::vector<std::string> glued_names = kstruct.vertex_names();
  for (const auto& nm : cv.shape.vertex_names())
    if (!place.count(nm)) {
      std::string f;
      do {
        f = fresh_name(fi++);
      } while (m.has_vertex(f));
      place[nm] = f;
      glued_names.push_back(f);
    }
  std::vector<std::array<std::string, 3>> ts;
  for (const auto& t : kstruct.triples())
    ts.push_back({kstruct.name(t.v[0]), kstruct.name(t.v[1]),
                  kstruct.name(t.v[2])});
  for (const auto& t : cv.shape.triples()) {
    std::array<std::string, 3> named{place[cv.shape.name(t.v[0])],
                                     place[cv.shape.name(t.v[1])],
                                     place[cv.shape.name(t.v[2])]};
    bool all_old = true;
    for (const auto& nm : named)
      if (!kstruct.has_vertex(nm)) all_old = false;
    if (!all_old) ts.push_back(named);
  }

  // Case-2 continuations: for every realization of an old positive level's
  // guard over the anchor, glue the closure continuation prescribed by phi
  if (psi->kind == FKind::IntrinsicExists) {
    for (const auto& body : psi->kids) {
      if (body->kind != FKind::IntrinsicForall || body->kids.empty()) continue;
      GuardView dv = view_of(body);
      Mask e_in_d = dv.shape.mask_of(e_struct.vertex_names());
      OldNew on;
      {
        Mask cprime_in_d =
            dv.shape.mask_of(cv.shape.names_of(cv.shape.full_mask() & ~emask));
        on = classify_old_new(a, dv.shape, e_in_d, e_in_d | cprime_in_d,
                              dv.shape.full_mask(), Variant::Strict);
      }
      if (on == OldNew::New) continue;
      // enumerate actual D_0 realizations over the anchor in m
      std::vector<int> danchor(dv.shape.size(), -1);
      for (int i = 0; i < dv.shape.size(); ++i)
        if (place.count(dv.shape.name(i)) &&
            m.has_vertex(place[dv.shape.name(i)]))
          danchor[i] = m.index_of(place[dv.shape.name(i)]);
      auto dcopies = enumerate_copy_maps(m, dv.shape, danchor);
      for (const auto& dc : dcopies) {
        // find a continuation guaranteed by phi: some inner exists realized
        bool glued_one = false;
        for (const auto& inner : body->kids) {
          if (inner->kind != FKind::IntrinsicExists) continue;
          GuardView kv = view_of(inner);
          Mask d0 = kv.shape.mask_of(dv.shape.vertex_names());
          Mask e0k = closure_mask(a, kv.shape, d0, Variant::Strict);
          FinStructure e0 = kv.shape.substructure(e0k);
          std::vector<int> eanchor(e0.size(), -1);
          for (int i = 0; i < e0.size(); ++i) {
            int dvix = dv.shape.index_of(e0.name(i));
            if (dvix >= 0) eanchor[i] = dc[dvix];
          }
          auto e0copies = enumerate_copy_maps(m, e0, eanchor);
          if (e0copies.empty()) continue;
          const auto& e0c = e0copies.front();
          // glue C_0k \ E_0k over the found continuation
          std::map<std::string, std::string> kplace;
          for (int i = 0; i < e0.size(); ++i)
            kplace[e0.name(i)] = m.name(e0c[i]);
          for (const auto& nm : kv.shape.vertex_names())
            if (!kplace.count(nm)) {
              std::string f;
              do {
                f = fresh_name(fi++);
              } while (m.has_vertex(f));
              kplace[nm] = f;
              glued_names.push_back(f);
            }
          for (const auto& t : kv.shape.triples()) {
            std::array<std::string, 3> named{kplace[kv.shape.name(t.v[0])],
                                             kplace[kv.shape.name(t.v[1])],
                                             kplace[kv.shape.name(t.v[2])]};
            bool all_old = true;
            for (const auto& nm : named)
              if (!kstruct.has_vertex(nm)) all_old = false;
            if (!all_old) ts.push_back(named);
          }
          glued_one = true;
          break;
        }
        if (!glued_one)
          fail(Errc::precondition,
               "companion: no continuation for a realized positive level");
      }
    }
  }

  comp.over_closure = FinStructure(glued_names, ts);
  for (const auto& nm : cv.shape.vertex_names())
    if (!xs.count(nm)) comp.witness[nm] = place[nm];
  if (!is_strong(a, comp.over_closure,
                 comp.over_closure.mask_of(kstruct.vertex_names()),
                 comp.over_closure.full_mask(), Variant::Strict)) {
    if (comp.over_closure.size() != kstruct.size())
      fail(Errc::precondition,
           "companion: glued structure is not strictly strong over the closure");
  }
  return comp;
}

}  // namespace predimlab
