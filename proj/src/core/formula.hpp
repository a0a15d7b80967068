#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "predimension.hpp"
#include "structure.hpp"

namespace predimlab {

// Closure-formula AST.  Guarded quantifiers carry the extension pair as a
// structure with a designated base; every shape vertex is named by the
// variable it binds (base vertices by free/outer variables, new vertices by
// members of bound_vars).  bound_vars may contain dummies that name no
// vertex; they still range over the model.
enum class FKind {
  TrivTrue,   // x = x
  TrivFalse,  // x != x
  Diag,
  NegDiag,
  And,
  Or,
  IntrinsicExists,  // eq-(1) shape: exists ys (Diag^i ∧ /\ bodies)
  IntrinsicForall,  // eq-(2) shape: forall ys (Diag^i -> \/ bodies)
  BoundedExists,    // exists^{<=eta} ys [Diag ∧ /\ bodies]
  FOExists,
  FOForall,
  FONot,
  FORel,
  FOEq,
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FKind kind = FKind::TrivTrue;
  std::string var;                 // Triv display var / FO quantifier var
  FinStructure shape;              // Diag/NegDiag/guards
  std::vector<std::string> vars;   // variable per shape vertex / FO atom args
  Mask base = 0;                   // guard base inside shape
  std::vector<std::string> bound_vars;
  long long eta = 0;
  std::vector<FormulaPtr> kids;

  std::vector<std::string> free_vars() const;
};

// factories (validate shapes and variable scoping)
FormulaPtr triv_true(const std::string& v);
FormulaPtr triv_false(const std::string& v);
FormulaPtr f_diag(FinStructure shape, std::vector<std::string> vars);
FormulaPtr f_neg_diag(FinStructure shape, std::vector<std::string> vars);
FormulaPtr f_and(std::vector<FormulaPtr> kids);
FormulaPtr f_or(std::vector<FormulaPtr> kids);
FormulaPtr f_iexists(FinStructure shape, Mask base,
                     std::vector<std::string> vars,
                     std::vector<std::string> bound_vars,
                     std::vector<FormulaPtr> bodies);
FormulaPtr f_iforall(FinStructure shape, Mask base,
                     std::vector<std::string> vars,
                     std::vector<std::string> bound_vars,
                     std::vector<FormulaPtr> bodies);
FormulaPtr f_bexists(long long eta, FinStructure shape, Mask base,
                     std::vector<std::string> vars,
                     std::vector<std::string> bound_vars,
                     std::vector<FormulaPtr> bodies);
FormulaPtr fo_exists(const std::string& v, FormulaPtr body);
FormulaPtr fo_forall(const std::string& v, FormulaPtr body);
FormulaPtr fo_not(FormulaPtr body);
FormulaPtr fo_rel(const std::string& x, const std::string& y,
                  const std::string& z);
FormulaPtr fo_eq(const std::string& x, const std::string& y);

nlohmann::json formula_to_json(const FormulaPtr& f);
FormulaPtr formula_from_json(const nlohmann::json& j);

// ---- classification ---------------------------------------------------

struct LevelInfo {
  int level = 0;
  bool sigma = false;     // basic Sigma^c_n
  bool pi = false;        // basic P^c_n
  bool lambda_s = false;  // positive combination of Sigma^c_n
  bool lambda_p = false;
  bool mixed = false;     // positive combination across both sides
  bool fo_only = false;
  std::vector<std::string> guard_violations;  // guards invalid at this alpha

  std::string tag() const;
};

LevelInfo level_of(const FormulaPtr& f, const Alpha& a);

bool is_basic(const FormulaPtr& f);

// Primary in the sense of the hierarchy: P^c_0/P^c_1 and Sigma^c_0 are
// primary; a forall level needs its base strong in the guard extension and
// the extension strong in each body guard, recursively.  BoundedExists
// nodes count as primary when their bodies are (the finite stand-in for the
// bounded-disjunction unwrapping).
bool is_primary(const FormulaPtr& f, const Alpha& a);

// ---- formula trees ------------------------------------------------------

struct FormulaTree {
  struct Node {
    FinStructure structure;
    std::vector<int> kids;
  };
  std::vector<Node> nodes;  // index 0 is the root
  bool sigma_root = true;
  std::vector<std::string> root_vars;  // variables of the root structure

  int leaf_count() const;
  nlohmann::json to_json() const;
  static FormulaTree from_json(const nlohmann::json& j);
};

FormulaTree tree_of(const FormulaPtr& f);
FormulaPtr formula_of(const FormulaTree& t);

// ---- evaluation ----------------------------------------------------------

using Assignment = std::map<std::string, int>;  // variable -> vertex index

Assignment parse_assignment(const FinStructure& m, const std::string& spec);

// Designated closure semantics: guard realizations are full diagrams whose
// base-to-extension pair is re-checked for strict intrinsicness at the
// evaluation alpha.
bool eval_closure(const Alpha& a, const FinStructure& m, const FormulaPtr& f,
                  const Assignment& asg);

// Brute-force first-order evaluation (the oracle fragment).
bool eval_fo(const FinStructure& m, const FormulaPtr& f, const Assignment& asg);

// Closure formula -> plain FO formula (guards expanded to explicit
// diagrams); BoundedExists is not expandable and is rejected.
FormulaPtr expand_to_fo(const FormulaPtr& f, const Alpha& a);

struct CorpusCounterexample {
  bool equal = true;
  FinStructure model;
  Assignment assignment;
};

// Exhaustive evaluation over every structure in `corpus` and every
// assignment of the shared free variables.
CorpusCounterexample equivalent_on_corpus(const Alpha& a, const FormulaPtr& f1,
                                          const FormulaPtr& f2,
                                          const std::vector<FinStructure>& corpus);

}  // namespace predimlab
