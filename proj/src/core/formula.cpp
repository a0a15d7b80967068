#include "formula.hpp"

#include <algorithm>
#include <set>

namespace predimlab {

namespace {

FormulaPtr make(Formula f) { return std::make_shared<Formula>(std::move(f)); }

void collect_free(const Formula& f, std::set<std::string>& out);

void collect_free_kids(const Formula& f, std::set<std::string>& out) {
  for (const auto& k : f.kids) collect_free(*k, out);
}

void collect_free(const Formula& f, std::set<std::string>& out) {
  switch (f.kind) {
    case FKind::TrivTrue:
    case FKind::TrivFalse:
      out.insert(f.var);
      break;
    case FKind::Diag:
    case FKind::NegDiag:
    case FKind::FORel:
    case FKind::FOEq:
      out.insert(f.vars.begin(), f.vars.end());
      break;
    case FKind::And:
    case FKind::Or:
    case FKind::FONot:
      collect_free_kids(f, out);
      break;
    case FKind::FOExists:
    case FKind::FOForall: {
      std::set<std::string> inner;
      collect_free_kids(f, inner);
      inner.erase(f.var);
      out.insert(inner.begin(), inner.end());
      break;
    }
    case FKind::IntrinsicExists:
    case FKind::IntrinsicForall:
    case FKind::BoundedExists: {
      std::set<std::string> inner;
      for (size_t i = 0; i < f.vars.size(); ++i) inner.insert(f.vars[i]);
      collect_free_kids(f, inner);
      for (const auto& b : f.bound_vars) inner.erase(b);
      out.insert(inner.begin(), inner.end());
      break;
    }
  }
}

void validate_guard(const FinStructure& shape, Mask base,
                    const std::vector<std::string>& vars,
                    const std::vector<std::string>& bound_vars) {
  if (static_cast<int>(vars.size()) != shape.size())
    fail(Errc::invalid_argument, "guard: one variable per shape vertex required");
  if (base & ~shape.full_mask())
    fail(Errc::invalid_argument, "guard: base outside shape");
  std::set<std::string> bound(bound_vars.begin(), bound_vars.end());
  if (bound.size() != bound_vars.size())
    fail(Errc::invalid_argument, "guard: repeated bound variable");
  for (int i = 0; i < shape.size(); ++i) {
    bool is_base = base & bit(i);
    bool in_bound = bound.count(vars[i]) > 0;
    if (is_base && in_bound)
      fail(Errc::invalid_argument, "guard: base vertex bound by the quantifier");
    if (!is_base && !in_bound)
      fail(Errc::invalid_argument,
           "guard: extension vertex '" + shape.name(i) + "' not quantified");
  }
  std::set<std::string> used;
  for (const auto& v : vars)
    if (!used.insert(v).second)
      fail(Errc::invalid_argument, "guard: variable repeats across vertices");
}

bool pi_side_atom(FKind k) {
  return k == FKind::TrivTrue || k == FKind::TrivFalse || k == FKind::NegDiag;
}
bool sigma_side_atom(FKind k) {
  return k == FKind::TrivTrue || k == FKind::TrivFalse || k == FKind::Diag;
}

}  // namespace

std::vector<std::string> Formula::free_vars() const {
  std::set<std::string> s;
  collect_free(*this, s);
  return std::vector<std::string>(s.begin(), s.end());
}

FormulaPtr triv_true(const std::string& v) {
  Formula f;
  f.kind = FKind::TrivTrue;
  f.var = v;
  return make(std::move(f));
}

FormulaPtr triv_false(const std::string& v) {
  Formula f;
  f.kind = FKind::TrivFalse;
  f.var = v;
  return make(std::move(f));
}

FormulaPtr f_diag(FinStructure shape, std::vector<std::string> vars) {
  if (static_cast<int>(vars.size()) != shape.size())
    fail(Errc::invalid_argument, "diag: one variable per vertex required");
  std::set<std::string> s(vars.begin(), vars.end());
  if (s.size() != vars.size())
    fail(Errc::invalid_argument, "diag: repeated variable");
  Formula f;
  f.kind = FKind::Diag;
  f.shape = std::move(shape);
  f.vars = std::move(vars);
  return make(std::move(f));
}

FormulaPtr f_neg_diag(FinStructure shape, std::vector<std::string> vars) {
  auto d = f_diag(std::move(shape), std::move(vars));
  Formula f = *d;
  f.kind = FKind::NegDiag;
  return make(std::move(f));
}

FormulaPtr f_and(std::vector<FormulaPtr> kids) {
  Formula f;
  f.kind = FKind::And;
  f.kids = std::move(kids);
  return make(std::move(f));
}

FormulaPtr f_or(std::vector<FormulaPtr> kids) {
  Formula f;
  f.kind = FKind::Or;
  f.kids = std::move(kids);
  return make(std::move(f));
}

namespace {

FormulaPtr guarded(FKind kind, long long eta, FinStructure shape, Mask base,
                   std::vector<std::string> vars,
                   std::vector<std::string> bound_vars,
                   std::vector<FormulaPtr> bodies) {
  validate_guard(shape, base, vars, bound_vars);
  for (const auto& b : bodies) {
    if (kind == FKind::IntrinsicForall) {
      if (!(sigma_side_atom(b->kind) || b->kind == FKind::IntrinsicExists ||
            b->kind == FKind::BoundedExists))
        fail(Errc::invalid_argument,
             "forall-guard bodies must be Sigma-side basic formulas");
    } else {
      if (!(pi_side_atom(b->kind) || b->kind == FKind::IntrinsicForall))
        fail(Errc::invalid_argument,
             "exists-guard bodies must be Pi-side basic formulas");
    }
  }
  Formula f;
  f.kind = kind;
  f.eta = eta;
  f.shape = std::move(shape);
  f.base = base;
  f.vars = std::move(vars);
  f.bound_vars = std::move(bound_vars);
  f.kids = std::move(bodies);
  return make(std::move(f));
}

}  // namespace

FormulaPtr f_iexists(FinStructure shape, Mask base, std::vector<std::string> vars,
                     std::vector<std::string> bound_vars,
                     std::vector<FormulaPtr> bodies) {
  return guarded(FKind::IntrinsicExists, 0, std::move(shape), base,
                 std::move(vars), std::move(bound_vars), std::move(bodies));
}

FormulaPtr f_iforall(FinStructure shape, Mask base, std::vector<std::string> vars,
                     std::vector<std::string> bound_vars,
                     std::vector<FormulaPtr> bodies) {
  return guarded(FKind::IntrinsicForall, 0, std::move(shape), base,
                 std::move(vars), std::move(bound_vars), std::move(bodies));
}

FormulaPtr f_bexists(long long eta, FinStructure shape, Mask base,
                     std::vector<std::string> vars,
                     std::vector<std::string> bound_vars,
                     std::vector<FormulaPtr> bodies) {
  if (eta < 0) fail(Errc::invalid_argument, "bexists: eta must be >= 0");
  return guarded(FKind::BoundedExists, eta, std::move(shape), base,
                 std::move(vars), std::move(bound_vars), std::move(bodies));
}

FormulaPtr fo_exists(const std::string& v, FormulaPtr body) {
  Formula f;
  f.kind = FKind::FOExists;
  f.var = v;
  f.kids = {std::move(body)};
  return make(std::move(f));
}

FormulaPtr fo_forall(const std::string& v, FormulaPtr body) {
  Formula f;
  f.kind = FKind::FOForall;
  f.var = v;
  f.kids = {std::move(body)};
  return make(std::move(f));
}

FormulaPtr fo_not(FormulaPtr body) {
  Formula f;
  f.kind = FKind::FONot;
  f.kids = {std::move(body)};
  return make(std::move(f));
}

FormulaPtr fo_rel(const std::string& x, const std::string& y,
                  const std::string& z) {
  Formula f;
  f.kind = FKind::FORel;
  f.vars = {x, y, z};
  return make(std::move(f));
}

FormulaPtr fo_eq(const std::string& x, const std::string& y) {
  Formula f;
  f.kind = FKind::FOEq;
  f.vars = {x, y};
  return make(std::move(f));
}

// ---- json ------------------------------------------------------------

nlohmann::json formula_to_json(const FormulaPtr& f) {
  nlohmann::json j;
  auto kids_json = [&]() {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& k : f->kids) arr.push_back(formula_to_json(k));
    return arr;
  };
  switch (f->kind) {
    case FKind::TrivTrue:
      j = {{"op", "true"}, {"var", f->var}};
      break;
    case FKind::TrivFalse:
      j = {{"op", "false"}, {"var", f->var}};
      break;
    case FKind::Diag:
    case FKind::NegDiag: {
      j["op"] = f->kind == FKind::Diag ? "diag" : "neg_diag";
      j["structure"] = f->shape.to_json();
      nlohmann::json vm = nlohmann::json::object();
      for (int i = 0; i < f->shape.size(); ++i) vm[f->shape.name(i)] = f->vars[i];
      j["vars"] = vm;
      break;
    }
    case FKind::And:
      j = {{"op", "and"}, {"args", kids_json()}};
      break;
    case FKind::Or:
      j = {{"op", "or"}, {"args", kids_json()}};
      break;
    case FKind::IntrinsicExists:
    case FKind::IntrinsicForall:
    case FKind::BoundedExists: {
      j["op"] = f->kind == FKind::IntrinsicExists  ? "iexists"
                : f->kind == FKind::IntrinsicForall ? "iforall"
                                                    : "bexists";
      if (f->kind == FKind::BoundedExists) j["eta"] = f->eta;
      j["structure"] = f->shape.to_json();
      j["base"] = f->shape.names_of(f->base);
      nlohmann::json vm = nlohmann::json::object();
      for (int i = 0; i < f->shape.size(); ++i) vm[f->shape.name(i)] = f->vars[i];
      j["vars"] = vm;
      j["bound"] = f->bound_vars;
      j["body"] = kids_json();
      break;
    }
    case FKind::FOExists:
      j = {{"op", "fo_exists"}, {"var", f->var}, {"body", formula_to_json(f->kids[0])}};
      break;
    case FKind::FOForall:
      j = {{"op", "fo_forall"}, {"var", f->var}, {"body", formula_to_json(f->kids[0])}};
      break;
    case FKind::FONot:
      j = {{"op", "fo_not"}, {"body", formula_to_json(f->kids[0])}};
      break;
    case FKind::FORel:
      j = {{"op", "rel"}, {"args", f->vars}};
      break;
    case FKind::FOEq:
      j = {{"op", "eq"}, {"args", f->vars}};
      break;
  }
  return j;
}

FormulaPtr formula_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("op")) fail(Errc::parse, "formula: missing op");
  std::string op = j.at("op").get<std::string>();
  auto kids_of = [&](const char* key) {
    std::vector<FormulaPtr> kids;
    for (const auto& k : j.value(key, nlohmann::json::array()))
      kids.push_back(formula_from_json(k));
    return kids;
  };
  auto guard_parts = [&](FinStructure& shape, Mask& base,
                         std::vector<std::string>& vars,
                         std::vector<std::string>& bound) {
    shape = FinStructure::from_json(j.at("structure"));
    base = shape.mask_of(j.at("base").get<std::vector<std::string>>());
    vars.resize(shape.size());
    const auto& vm = j.at("vars");
    for (int i = 0; i < shape.size(); ++i) {
      if (!vm.contains(shape.name(i)))
        fail(Errc::parse, "formula: vertex '" + shape.name(i) + "' has no variable");
      vars[i] = vm.at(shape.name(i)).get<std::string>();
    }
    bound = j.value("bound", std::vector<std::string>{});
  };
  if (op == "true") return triv_true(j.value("var", "x1"));
  if (op == "false") return triv_false(j.value("var", "x1"));
  if (op == "diag" || op == "neg_diag") {
    FinStructure shape = FinStructure::from_json(j.at("structure"));
    std::vector<std::string> vars(shape.size());
    const auto& vm = j.at("vars");
    for (int i = 0; i < shape.size(); ++i)
      vars[i] = vm.at(shape.name(i)).get<std::string>();
    return op == "diag" ? f_diag(std::move(shape), std::move(vars))
                        : f_neg_diag(std::move(shape), std::move(vars));
  }
  if (op == "and") return f_and(kids_of("args"));
  if (op == "or") return f_or(kids_of("args"));
  if (op == "iexists" || op == "iforall" || op == "bexists") {
    FinStructure shape;
    Mask base = 0;
    std::vector<std::string> vars, bound;
    guard_parts(shape, base, vars, bound);
    auto bodies = kids_of("body");
    if (op == "iexists")
      return f_iexists(std::move(shape), base, std::move(vars), std::move(bound),
                       std::move(bodies));
    if (op == "iforall")
      return f_iforall(std::move(shape), base, std::move(vars), std::move(bound),
                       std::move(bodies));
    return f_bexists(j.at("eta").get<long long>(), std::move(shape), base,
                     std::move(vars), std::move(bound), std::move(bodies));
  }
  if (op == "fo_exists") return fo_exists(j.at("var").get<std::string>(),
                                          formula_from_json(j.at("body")));
  if (op == "fo_forall") return fo_forall(j.at("var").get<std::string>(),
                                          formula_from_json(j.at("body")));
  if (op == "fo_not") return fo_not(formula_from_json(j.at("body")));
  if (op == "rel") {
    auto a = j.at("args").get<std::vector<std::string>>();
    if (a.size() != 3) fail(Errc::parse, "rel needs 3 args");
    return fo_rel(a[0], a[1], a[2]);
  }
  if (op == "eq") {
    auto a = j.at("args").get<std::vector<std::string>>();
    if (a.size() != 2) fail(Errc::parse, "eq needs 2 args");
    return fo_eq(a[0], a[1]);
  }
  fail(Errc::parse, "formula: unknown op '" + op + "'");
}

// ---- classification ----------------------------------------------------

bool is_basic(const FormulaPtr& f) {
  switch (f->kind) {
    case FKind::TrivTrue:
    case FKind::TrivFalse:
    case FKind::Diag:
    case FKind::NegDiag:
    case FKind::IntrinsicExists:
    case FKind::IntrinsicForall:
      return true;
    default:
      return false;
  }
}

std::string LevelInfo::tag() const {
  if (fo_only) return "FO-only";
  if (sigma && pi) return "Lambda_h";
  if (sigma) return "Sigma_c";
  if (pi) return "Pi_c";
  if (lambda_s && lambda_p) return "Lambda_h";
  if (lambda_s) return "Lambda_s";
  if (lambda_p) return "Lambda_p";
  return "Lambda_h";
}

namespace {

void check_guard(const FormulaPtr& f, const Alpha& a, LevelInfo& info) {
  if (!in_class(a, f->shape, Variant::Strict))
    info.guard_violations.push_back("guard extension leaves C*+ at alpha=" +
                                    a.str());
  else if (!is_intrinsic(a, f->shape, f->base, f->shape.full_mask(),
                         Variant::Strict))
    info.guard_violations.push_back(
        "guard base not strict-intrinsic in extension at alpha=" + a.str());
}

}  // namespace

LevelInfo level_of(const FormulaPtr& f, const Alpha& a) {
  LevelInfo info;
  switch (f->kind) {
    case FKind::TrivTrue:
    case FKind::TrivFalse:
      info.sigma = info.pi = info.lambda_s = info.lambda_p = true;
      info.level = 0;
      return info;
    case FKind::Diag:
      info.sigma = info.lambda_s = true;
      info.level = 0;
      if (!in_class(a, f->shape, Variant::Strict))
        info.guard_violations.push_back("atom shape leaves C*+ at alpha=" + a.str());
      return info;
    case FKind::NegDiag:
      info.pi = info.lambda_p = true;
      info.level = 0;
      if (!in_class(a, f->shape, Variant::Strict))
        info.guard_violations.push_back("atom shape leaves C*+ at alpha=" + a.str());
      return info;
    case FKind::IntrinsicExists:
    case FKind::BoundedExists: {
      int lvl = 0;
      for (const auto& k : f->kids) {
        LevelInfo ki = level_of(k, a);
        lvl = std::max(lvl, ki.level);
        for (auto& g : ki.guard_violations) info.guard_violations.push_back(g);
      }
      info.level = lvl + 1;
      info.sigma = info.lambda_s = true;
      check_guard(f, a, info);
      return info;
    }
    case FKind::IntrinsicForall: {
      int lvl = 0;
      for (const auto& k : f->kids) {
        LevelInfo ki = level_of(k, a);
        lvl = std::max(lvl, ki.level);
        for (auto& g : ki.guard_violations) info.guard_violations.push_back(g);
      }
      info.level = lvl + 1;
      info.pi = info.lambda_p = true;
      check_guard(f, a, info);
      return info;
    }
    case FKind::And:
    case FKind::Or: {
      bool all_s = true, all_p = true, any_fo = false;
      int lvl = 0;
      for (const auto& k : f->kids) {
        LevelInfo ki = level_of(k, a);
        lvl = std::max(lvl, ki.level);
        all_s = all_s && (ki.sigma || ki.lambda_s);
        all_p = all_p && (ki.pi || ki.lambda_p);
        any_fo = any_fo || ki.fo_only;
        for (auto& g : ki.guard_violations) info.guard_violations.push_back(g);
      }
      info.level = lvl;
      if (any_fo) {
        info.fo_only = true;
        return info;
      }
      info.lambda_s = all_s;
      info.lambda_p = all_p;
      info.mixed = !all_s && !all_p;
      return info;
    }
    case FKind::FOExists:
    case FKind::FOForall: {
      LevelInfo ki = level_of(f->kids[0], a);
      info.level = ki.level + 1;
      info.fo_only = true;
      return info;
    }
    case FKind::FONot: {
      LevelInfo ki = level_of(f->kids[0], a);
      info.level = ki.level;
      info.fo_only = true;
      return info;
    }
    case FKind::FORel:
    case FKind::FOEq:
      info.level = 0;
      info.fo_only = true;
      return info;
  }
  return info;
}

bool is_primary(const FormulaPtr& f, const Alpha& a) {
  switch (f->kind) {
    case FKind::TrivTrue:
    case FKind::TrivFalse:
    case FKind::Diag:
    case FKind::NegDiag:
      return true;
    case FKind::IntrinsicExists:
    case FKind::BoundedExists: {
      for (const auto& k : f->kids)
        if (!is_primary(k, a)) return false;
      return true;
    }
    case FKind::IntrinsicForall: {
      // P^c_1 (all bodies level-0 atoms) is primary outright.
      bool all_atoms = true;
      for (const auto& k : f->kids)
        if (!sigma_side_atom(k->kind)) all_atoms = false;
      if (all_atoms) return true;
      if (!is_strong(a, f->shape, f->base, f->shape.full_mask(),
                     Variant::NonStrict))
        return false;
      for (const auto& k : f->kids) {
        if (k->kind == FKind::IntrinsicExists || k->kind == FKind::BoundedExists) {
          // the body guard must extend this guard's extension strongly
          if (!is_strong(a, k->shape, k->base, k->shape.full_mask(),
                         Variant::NonStrict))
            return false;
        }
        if (!is_primary(k, a)) return false;
      }
      return true;
    }
    default:
      return false;
  }
}

// ---- trees ---------------------------------------------------------------

int FormulaTree::leaf_count() const {
  int n = 0;
  for (const auto& node : nodes)
    if (node.kids.empty()) ++n;
  if (nodes.size() == 1) return 1;
  // the root never counts as a leaf once it has a child
  return n;
}

nlohmann::json FormulaTree::to_json() const {
  nlohmann::json j;
  j["sigma_root"] = sigma_root;
  j["root_vars"] = root_vars;
  j["nodes"] = nlohmann::json::array();
  for (const auto& node : nodes) {
    nlohmann::json nj;
    nj["structure"] = node.structure.to_json();
    nj["kids"] = node.kids;
    j["nodes"].push_back(nj);
  }
  j["leaves"] = leaf_count();
  return j;
}

FormulaTree FormulaTree::from_json(const nlohmann::json& j) {
  FormulaTree t;
  t.sigma_root = j.at("sigma_root").get<bool>();
  t.root_vars = j.at("root_vars").get<std::vector<std::string>>();
  for (const auto& nj : j.at("nodes")) {
    Node n;
    n.structure = FinStructure::from_json(nj.at("structure"));
    n.kids = nj.at("kids").get<std::vector<int>>();
    t.nodes.push_back(std::move(n));
  }
  return t;
}

namespace {

// Renames shape vertices to their variables; keeps the (sorted) result.
FinStructure shape_as_vars(const FinStructure& shape,
                           const std::vector<std::string>& vars) {
  std::vector<std::array<std::string, 3>> ts;
  for (const auto& t : shape.triples())
    ts.push_back({vars[t.v[0]], vars[t.v[1]], vars[t.v[2]]});
  return FinStructure(vars, ts);
}

int tree_build(const FormulaPtr& f, FormulaTree& t);

// attaches the subtree of a body formula under node `parent_ix`,
// requiring its guard base to coincide with the parent's structure.
void attach_body(const FormulaPtr& body, FormulaTree& t, int parent_ix) {
  const FinStructure& parent = t.nodes[parent_ix].structure;
  if (body->kind == FKind::Diag || body->kind == FKind::NegDiag) {
    FinStructure leaf = shape_as_vars(body->shape, body->vars);
    for (const auto& n : leaf.vertex_names())
      if (!parent.has_vertex(n))
        fail(Errc::precondition,
             "tree_of: atom body uses a variable outside the guard scope");
    t.nodes.push_back({leaf, {}});
    t.nodes[parent_ix].kids.push_back(static_cast<int>(t.nodes.size()) - 1);
    return;
  }
  if (body->kind == FKind::IntrinsicExists || body->kind == FKind::IntrinsicForall) {
    FinStructure base_struct =
        shape_as_vars(body->shape.substructure(body->base),
                      [&] {
                        std::vector<std::string> bv;
                        for (int i = 0; i < body->shape.size(); ++i)
                          if (body->base & bit(i)) bv.push_back(body->vars[i]);
                        return bv;
                      }());
    if (!(base_struct == parent))
      fail(Errc::precondition,
           "tree_of: body guard base does not match the parent extension");
    FinStructure extn = shape_as_vars(body->shape, body->vars);
    t.nodes.push_back({extn, {}});
    int ix = static_cast<int>(t.nodes.size()) - 1;
    t.nodes[parent_ix].kids.push_back(ix);
    for (const auto& k : body->kids) attach_body(k, t, ix);
    return;
  }
  fail(Errc::precondition, "tree_of: body is not tree-shaped basic");
}

}  // namespace

FormulaTree tree_of(const FormulaPtr& f) {
  FormulaTree t;
  if (f->kind == FKind::Diag || f->kind == FKind::NegDiag) {
    FinStructure s = shape_as_vars(f->shape, f->vars);
    t.sigma_root = f->kind == FKind::Diag;
    t.root_vars = s.vertex_names();
    t.nodes.push_back({s, {}});
    return t;
  }
  if (f->kind == FKind::IntrinsicExists || f->kind == FKind::IntrinsicForall) {
    std::vector<std::string> base_vars;
    for (int i = 0; i < f->shape.size(); ++i)
      if (f->base & bit(i)) base_vars.push_back(f->vars[i]);
    FinStructure root = shape_as_vars(f->shape.substructure(f->base), base_vars);
    t.sigma_root = f->kind == FKind::IntrinsicExists;
    t.root_vars = root.vertex_names();
    t.nodes.push_back({root, {}});
    FinStructure extn = shape_as_vars(f->shape, f->vars);
    t.nodes.push_back({extn, {}});
    t.nodes[0].kids.push_back(1);
    for (const auto& k : f->kids) attach_body(k, t, 1);
    return t;
  }
  fail(Errc::precondition, "tree_of: formula is not basic (or not diagram-based)");
}

FormulaPtr formula_of(const FormulaTree& t) {
  if (t.nodes.empty()) fail(Errc::invalid_argument, "formula_of: empty tree");
  if (t.nodes[0].kids.empty()) {
    const FinStructure& s = t.nodes[0].structure;
    return t.sigma_root ? f_diag(s, s.vertex_names())
                        : f_neg_diag(s, s.vertex_names());
  }
  if (t.nodes[0].kids.size() != 1)
    fail(Errc::invalid_argument, "formula_of: root must have one guard child");
  // Recursive reconstruction mirroring attach_body.
  std::function<FormulaPtr(int, int, bool)> build_guard =
      [&](int base_ix, int ext_ix, bool sigma_here) -> FormulaPtr {
    const FinStructure& base = t.nodes[base_ix].structure;
    const FinStructure& ext = t.nodes[ext_ix].structure;
    Mask base_mask = ext.mask_of(base.vertex_names());
    std::vector<std::string> vars = ext.vertex_names();
    std::vector<std::string> bound;
    for (int i = 0; i < ext.size(); ++i)
      if (!(base_mask & bit(i))) bound.push_back(ext.name(i));
    std::vector<FormulaPtr> bodies;
    for (int k : t.nodes[ext_ix].kids) {
      const FinStructure& child = t.nodes[k].structure;
      bool inside = true;
      for (const auto& n : child.vertex_names())
        if (!ext.has_vertex(n)) inside = false;
      bool child_sigma = !sigma_here;
      if (inside && t.nodes[k].kids.empty())
        bodies.push_back(child_sigma ? f_diag(child, child.vertex_names())
                                     : f_neg_diag(child, child.vertex_names()));
      else
        bodies.push_back(build_guard(ext_ix, k, child_sigma));
    }
    return sigma_here ? f_iexists(ext, base_mask, vars, bound, bodies)
                      : f_iforall(ext, base_mask, vars, bound, bodies);
  };
  return build_guard(0, t.nodes[0].kids[0], t.sigma_root);
}

// ---- evaluation -----------------------------------------------------------

Assignment parse_assignment(const FinStructure& m, const std::string& spec) {
  Assignment asg;
  size_t pos = 0;
  while (pos < spec.size()) {
    size_t comma = spec.find(',', pos);
    std::string item = spec.substr(pos, comma == std::string::npos
                                            ? std::string::npos
                                            : comma - pos);
    pos = comma == std::string::npos ? spec.size() : comma + 1;
    if (item.empty()) continue;
    size_t eq = item.find('=');
    if (eq == std::string::npos)
      fail(Errc::parse, "assignment item '" + item + "' lacks '='");
    std::string var = item.substr(0, eq), vertex = item.substr(eq + 1);
    int ix = m.index_of(vertex);
    if (ix < 0) fail(Errc::invalid_argument, "assignment names unknown vertex '" + vertex + "'");
    asg[var] = ix;
  }
  return asg;
}

namespace {

struct Evaluator {
  const Alpha& a;
  const FinStructure& m;
  bool closure_mode;  // guarded nodes allowed

  bool diag_holds(const Formula& f, const Assignment& asg) const {
    std::vector<int> tuple(f.shape.size());
    Mask seen = 0;
    for (int i = 0; i < f.shape.size(); ++i) {
      auto it = asg.find(f.vars[i]);
      if (it == asg.end())
        fail(Errc::invalid_argument, "unassigned free variable '" + f.vars[i] + "'");
      tuple[i] = it->second;
      if (seen & bit(tuple[i])) return false;  // diagram forces distinctness
      seen |= bit(tuple[i]);
    }
    for (int x = 0; x < f.shape.size(); ++x)
      for (int y = x + 1; y < f.shape.size(); ++y)
        for (int z = y + 1; z < f.shape.size(); ++z)
          if (f.shape.has_triple(x, y, z) !=
              m.has_triple(tuple[x], tuple[y], tuple[z]))
            return false;
    return true;
  }

  bool guard_valid(const Formula& f) const {
    if (!in_class(a, f.shape, Variant::Strict)) return false;
    if (f.kind == FKind::BoundedExists) return true;  // plain diagram guard
    return is_intrinsic(a, f.shape, f.base, f.shape.full_mask(), Variant::Strict);
  }

  // all guard realizations: pairs (embedding map, dummy-extension count)
  // handled through a callback; returns false when the callback asked to
  // stop (short-circuit).
  template <typename CB>
  void realizations(const Formula& f, const Assignment& asg, CB&& cb) const {
    // anchor base vertices through the assignment
    std::vector<int> anchor(f.shape.size(), -1);
    for (int i = 0; i < f.shape.size(); ++i) {
      if (!(f.base & bit(i))) continue;
      auto it = asg.find(f.vars[i]);
      if (it == asg.end())
        fail(Errc::invalid_argument, "unassigned free variable '" + f.vars[i] + "'");
      anchor[i] = it->second;
    }
    {
      Mask seen = 0;
      for (int i = 0; i < f.shape.size(); ++i) {
        if (anchor[i] < 0) continue;
        if (seen & bit(anchor[i])) return;  // base tuple not injective: no copies
        seen |= bit(anchor[i]);
      }
    }
    std::vector<int> vertex_of_bound(f.bound_vars.size(), -1);
    for (int i = 0; i < f.shape.size(); ++i) {
      if (f.base & bit(i)) continue;
      for (size_t b = 0; b < f.bound_vars.size(); ++b)
        if (f.bound_vars[b] == f.vars[i]) vertex_of_bound[b] = i;
    }
    int dummy_count = 0;
    for (int v : vertex_of_bound)
      if (v < 0) ++dummy_count;
    auto maps = enumerate_embeddings(m, f.shape, anchor);
    for (const auto& mp : maps) {
      // dummies range over all vertices of m independently
      std::vector<size_t> dummy_ix;
      for (size_t b = 0; b < f.bound_vars.size(); ++b)
        if (vertex_of_bound[b] < 0) dummy_ix.push_back(b);
      long long total = 1;
      for (int d = 0; d < dummy_count; ++d) total *= std::max(1, m.size());
      for (long long code = 0; code < total; ++code) {
        Assignment ext = asg;
        long long c = code;
        for (size_t b = 0; b < f.bound_vars.size(); ++b) {
          if (vertex_of_bound[b] >= 0)
            ext[f.bound_vars[b]] = mp[vertex_of_bound[b]];
        }
        for (size_t d = 0; d < dummy_ix.size(); ++d) {
          if (m.size() == 0) break;
          ext[f.bound_vars[dummy_ix[d]]] = static_cast<int>(c % m.size());
          c /= m.size();
        }
        if (dummy_count > 0 && m.size() == 0) break;
        Mask img = 0;
        for (int i = 0; i < f.shape.size(); ++i)
          if (!(f.base & bit(i))) img |= bit(mp[i]);
        if (!cb(ext, img)) return;
      }
    }
  }

  bool eval(const FormulaPtr& fp, const Assignment& asg) const {
    const Formula& f = *fp;
    switch (f.kind) {
      case FKind::TrivTrue:
        return true;
      case FKind::TrivFalse:
        return false;
      case FKind::Diag:
        return diag_holds(f, asg);
      case FKind::NegDiag:
        return !diag_holds(f, asg);
      case FKind::And:
        for (const auto& k : f.kids)
          if (!eval(k, asg)) return false;
        return true;
      case FKind::Or:
        for (const auto& k : f.kids)
          if (eval(k, asg)) return true;
        return false;
      case FKind::IntrinsicExists: {
        if (!closure_mode)
          fail(Errc::precondition, "eval_fo cannot evaluate guarded nodes");
        if (!guard_valid(f)) return false;
        bool found = false;
        realizations(f, asg, [&](const Assignment& ext, Mask) {
          bool ok = true;
          for (const auto& k : f.kids)
            if (!eval(k, ext)) {
              ok = false;
              break;
            }
          if (ok) {
            found = true;
            return false;  // stop
          }
          return true;
        });
        return found;
      }
      case FKind::IntrinsicForall: {
        if (!closure_mode)
          fail(Errc::precondition, "eval_fo cannot evaluate guarded nodes");
        if (!guard_valid(f)) return true;  // unsatisfiable guard: vacuous
        bool all = true;
        realizations(f, asg, [&](const Assignment& ext, Mask) {
          bool any = false;
          for (const auto& k : f.kids)
            if (eval(k, ext)) {
              any = true;
              break;
            }
          if (!any) {
            all = false;
            return false;
          }
          return true;
        });
        return all;
      }
      case FKind::BoundedExists: {
        if (!closure_mode)
          fail(Errc::precondition, "eval_fo cannot evaluate guarded nodes");
        if (!guard_valid(f)) return true;  // no realizations: count 0 <= eta
        std::set<Mask> images;
        bool all = true;
        realizations(f, asg, [&](const Assignment& ext, Mask img) {
          images.insert(img);
          for (const auto& k : f.kids)
            if (!eval(k, ext)) {
              all = false;
              return false;
            }
          return true;
        });
        return all && static_cast<long long>(images.size()) <= f.eta;
      }
      case FKind::FOExists: {
        for (int v = 0; v < m.size(); ++v) {
          Assignment ext = asg;
          ext[f.var] = v;
          if (eval(f.kids[0], ext)) return true;
        }
        return false;
      }
      case FKind::FOForall: {
        for (int v = 0; v < m.size(); ++v) {
          Assignment ext = asg;
          ext[f.var] = v;
          if (!eval(f.kids[0], ext)) return false;
        }
        return true;
      }
      case FKind::FONot:
        return !eval(f.kids[0], asg);
      case FKind::FORel: {
        std::array<int, 3> t;
        for (int i = 0; i < 3; ++i) {
          auto it = asg.find(f.vars[i]);
          if (it == asg.end())
            fail(Errc::invalid_argument, "unassigned variable '" + f.vars[i] + "'");
          t[i] = it->second;
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) return false;
        return m.has_triple(t[0], t[1], t[2]);
      }
      case FKind::FOEq: {
        auto i1 = asg.find(f.vars[0]), i2 = asg.find(f.vars[1]);
        if (i1 == asg.end() || i2 == asg.end())
          fail(Errc::invalid_argument, "unassigned variable in equality");
        return i1->second == i2->second;
      }
    }
    return false;
  }
};

}  // namespace

bool eval_closure(const Alpha& a, const FinStructure& m, const FormulaPtr& f,
                  const Assignment& asg) {
  Evaluator ev{a, m, true};
  return ev.eval(f, asg);
}

bool eval_fo(const FinStructure& m, const FormulaPtr& f, const Assignment& asg) {
  Alpha one(Rat(1));
  Evaluator ev{one, m, false};
  return ev.eval(f, asg);
}

FormulaPtr expand_to_fo(const FormulaPtr& f, const Alpha& a) {
  switch (f->kind) {
    case FKind::TrivTrue:
    case FKind::TrivFalse:
    case FKind::FORel:
    case FKind::FOEq:
      return f;
    case FKind::Diag:
    case FKind::NegDiag: {
      std::vector<FormulaPtr> lits;
      for (size_t i = 0; i < f->vars.size(); ++i)
        for (size_t j = i + 1; j < f->vars.size(); ++j)
          lits.push_back(fo_not(fo_eq(f->vars[i], f->vars[j])));
      for (int x = 0; x < f->shape.size(); ++x)
        for (int y = x + 1; y < f->shape.size(); ++y)
          for (int z = y + 1; z < f->shape.size(); ++z) {
            auto atom = fo_rel(f->vars[x], f->vars[y], f->vars[z]);
            lits.push_back(f->shape.has_triple(x, y, z) ? atom : fo_not(atom));
          }
      FormulaPtr conj = f_and(lits);
      return f->kind == FKind::Diag ? conj : fo_not(conj);
    }
    case FKind::And: {
      std::vector<FormulaPtr> kids;
      for (const auto& k : f->kids) kids.push_back(expand_to_fo(k, a));
      return f_and(kids);
    }
    case FKind::Or: {
      std::vector<FormulaPtr> kids;
      for (const auto& k : f->kids) kids.push_back(expand_to_fo(k, a));
      return f_or(kids);
    }
    case FKind::FONot:
      return fo_not(expand_to_fo(f->kids[0], a));
    case FKind::FOExists:
      return fo_exists(f->var, expand_to_fo(f->kids[0], a));
    case FKind::FOForall:
      return fo_forall(f->var, expand_to_fo(f->kids[0], a));
    case FKind::IntrinsicExists:
    case FKind::IntrinsicForall: {
      bool valid = in_class(a, f->shape, Variant::Strict) &&
                   is_intrinsic(a, f->shape, f->base, f->shape.full_mask(),
                                Variant::Strict);
      if (!valid)
        return f->kind == FKind::IntrinsicExists ? triv_false("x1") : triv_true("x1");
      auto diag = f_diag(f->shape, f->vars);
      FormulaPtr inner;
      if (f->kind == FKind::IntrinsicExists) {
        std::vector<FormulaPtr> kids{expand_to_fo(diag, a)};
        for (const auto& k : f->kids) kids.push_back(expand_to_fo(k, a));
        inner = f_and(kids);
      } else {
        std::vector<FormulaPtr> kids;
        for (const auto& k : f->kids) kids.push_back(expand_to_fo(k, a));
        inner = f_or({fo_not(expand_to_fo(diag, a)),
                      kids.empty() ? triv_false("x1") : f_or(kids)});
      }
      // quantify the bound tuple; dummies quantify too
      for (auto it = f->bound_vars.rbegin(); it != f->bound_vars.rend(); ++it)
        inner = f->kind == FKind::IntrinsicExists ? fo_exists(*it, inner)
                                                  : fo_forall(*it, inner);
      return inner;
    }
    case FKind::BoundedExists:
      fail(Errc::unsupported, "expand_to_fo: bounded quantifier not expandable");
  }
  fail(Errc::unsupported, "expand_to_fo: unhandled node");
}

CorpusCounterexample equivalent_on_corpus(const Alpha& a, const FormulaPtr& f1,
                                          const FormulaPtr& f2,
                                          const std::vector<FinStructure>& corpus) {
  std::set<std::string> fv;
  for (auto& v : f1->free_vars()) fv.insert(v);
  for (auto& v : f2->free_vars()) fv.insert(v);
  std::vector<std::string> vars(fv.begin(), fv.end());
  CorpusCounterexample res;
  for (const auto& m : corpus) {
    const int n = m.size();
    if (n == 0 && !vars.empty()) continue;
    long long total = 1;
    for (size_t i = 0; i < vars.size(); ++i) total *= std::max(1, n);
    for (long long code = 0; code < total; ++code) {
      Assignment asg;
      long long c = code;
      for (const auto& v : vars) {
        asg[v] = static_cast<int>(c % std::max(1, n));
        c /= std::max(1, n);
      }
      bool b1 = eval_closure(a, m, f1, asg);
      bool b2 = eval_closure(a, m, f2, asg);
      if (b1 != b2) {
        res.equal = false;
        res.model = m;
        res.assignment = asg;
        return res;
      }
    }
  }
  return res;
}

}  // namespace predimlab
