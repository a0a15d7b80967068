#pragma once

#include "formula.hpp"
#include "generic.hpp"
#include "rewrite.hpp"

namespace predimlab {

// One interaction type between copies of D over E and a fixed copy of C:
// the non-free joint diagram, the gadget copy of D whose presence signals
// it, the closure trace (the H_s member), and the freeness detector.
struct CoreGadget {
  FinStructure interaction;        // the non-free amalgam of C and a D-copy
  FinStructure gadget;             // G_s: E together with one D-copy
  std::vector<std::string> trace;  // H_s: vertex names of cl(D-part)\C
  FormulaPtr phi;                  // Lambda_s0 formula over (x,v,w)
  std::vector<std::string> e_vars;
  std::vector<std::string> v_vars;  // gadget \ E
  std::vector<std::string> w_vars;  // all of D
};

// negative_core(E, C, D): E named inside both C and D (same names); the new
// parts of C and D are disjoint.  Pre: E <=* C properly or C = E,
// E intrinsic-extended to D with E <= D.
std::vector<CoreGadget> negative_core(const Alpha& a, const FinStructure& c,
                                      const std::vector<std::string>& e_names,
                                      const FinStructure& d);

// The closure-formula transform for exists-elimination: psi is a primary
// Sigma-side formula (or a disjunction of them) whose free tuple splits
// into the kept xvars and the eliminated rest.  Supported depth: the
// innermost three-level pattern; deeper nesting is rejected loudly.
FormulaPtr phi_for_exists(const Alpha& a, const FormulaPtr& psi,
                          const std::vector<std::string>& xvars);

struct Companion {
  FinStructure over_closure;  // cl*_M(a) together with the fresh parts
  FinStructure closure;       // cl*_M(a) as an induced substructure of M
  // witness values for psi's eliminated variables, named in over_closure
  std::map<std::string, std::string> witness;
};

// Pre: M satisfies phi_for_exists(psi) at the given tuple.  Builds the
// structure whose free amalgamation over cl*_M(a) realizes a witness.
Companion companion_structure(const Alpha& a, const FinStructure& m,
                              const std::map<std::string, std::string>& abar,
                              const FormulaPtr& psi,
                              const std::vector<std::string>& xvars);

}  // namespace predimlab
