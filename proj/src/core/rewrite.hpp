#pragma once

#include "formula.hpp"

namespace predimlab {

// One way two guard extensions over a common base can sit together inside
// an ambient class structure: identifications of their new parts plus any
// crossing relations.  map1/map2 send extension vertex indices into `joint`.
struct Amalgam {
  FinStructure joint;
  std::vector<int> map1;
  std::vector<int> map2;
};

// All amalgams of (ext1 over its base) and (ext2 over its base), the two
// bases aligned by position; filtered to class members.  When
// require_intrinsic is set, the joint must be a strict intrinsic extension
// of the base (which is what unions of realized guards always are).
std::vector<Amalgam> enumerate_amalgams(const Alpha& a, const FinStructure& ext1,
                                        Mask base1, const FinStructure& ext2,
                                        Mask base2, bool require_intrinsic);

// Canonical-form rewrite for the conjunction of two basic closure formulas
// sharing their free tuple.  Sigma-side pairs become a disjunction of
// Sigma-side basics; Pi-side pairs the three-disjunct-plus-chi form (the
// realizability guards on the joint branch are spelled out, and the chi
// block is a conjunction; the literally displayed variant is checked
// separately by the suite and its violations reported as findings).
FormulaPtr conj_to_canonical(const Alpha& a, const FormulaPtr& f1,
                             const FormulaPtr& f2);

// The paper-displayed variant of the Pi-side rewrite, kept for the finding
// report: mismatched bases give f1 v f2, matched bases the plain
// three-disjunct form with a disjoined chi block.
FormulaPtr conj_to_canonical_displayed(const Alpha& a, const FormulaPtr& f1,
                                       const FormulaPtr& f2);

// Canonical-form (iii): forall ys (phi_qf -> \/ psis) rewritten through the
// guarded form, with the complete diagrams refuting phi enumerated over the
// full variable tuple.  Assignments are assumed injective across the free
// context (diagram atoms cannot express collisions).
FormulaPtr implication_to_pc(const Alpha& a, const FormulaPtr& phi_qf,
                             const FinStructure& guard, Mask base,
                             const std::vector<std::string>& guard_vars,
                             const std::vector<std::string>& bound_vars,
                             const std::vector<FormulaPtr>& psis);

struct PrimaryResult {
  bool reduced = false;
  std::vector<FormulaPtr> disjuncts;
  std::string diagnostic;
};

// Reduction to a disjunction of primary Sigma-side formulas.  Handles
// basics, disjunctions, and conjunctions of Sigma-side basics; forall
// levels with a non-strong base go through the bounded-exists form with
// eta from the classic copy bound.  A forall level whose body guard is not
// a strong extension is reported non-reducible with diagnostics.
PrimaryResult to_primary_disjunction(const Alpha& a, const FormulaPtr& f);

// Corpus equivalence restricted to injective assignments (the convention
// under which diagram-based rewrites are exact).
CorpusCounterexample equivalent_on_corpus_injective(
    const Alpha& a, const FormulaPtr& f1, const FormulaPtr& f2,
    const std::vector<FinStructure>& corpus);

}  // namespace predimlab
