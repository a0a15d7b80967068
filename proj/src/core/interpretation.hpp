#pragma once

#include <utility>

#include "formula.hpp"
#include "generic.hpp"

namespace predimlab {

// The two non-isomorphic zero extensions whose copy counts play numerator
// and denominator.
struct RationalFixture {
  Alpha alpha;
  FinStructure base;     // A
  FinStructure bgadget;  // B over A
  FinStructure cgadget;  // C over A, not isomorphic to B over A

  // A = {a1,a2}; B adds b with {a1,a2,b}; C adds c0,c1 with
  // {a1,c0,c1},{a2,c0,c1}.  Other alphas synthesize both gadgets.
  static RationalFixture standard(const Alpha& a);
  void validate() const;
};

// ---- set coding ----------------------------------------------------------

// The zero gadget defining R^k: base {s1..sk, v} covered by the gadget
// triples, symmetric in the first k positions.  k <= 2.
FinStructure coding_gadget(const Alpha& a, int k);

// rho_k(y1..yk, v): the gadget pattern realized with its prescribed diagram
// (negative literals only over triples touching the fresh part).
FormulaPtr coding_formula(const Alpha& a, int k,
                          const std::vector<std::string>& yvars,
                          const std::string& vvar);

struct CodeResult {
  FinStructure fragment;
  std::string code_vertex;
};

// Attaches one code vertex plus one gadget per member of `family`; verifies
// the decode round trip and class membership before returning.
CodeResult build_code(const Alpha& a, const FinStructure& fragment,
                      const std::vector<std::string>& support, int k,
                      const std::vector<std::vector<std::string>>& family);

struct DecodeResult {
  std::vector<std::vector<std::string>> family;
  bool code_vertex_known;  // false: v decoded nothing (warning flag)
};

DecodeResult decode(const Alpha& a, const FinStructure& fragment,
                    const std::string& v, int k);

// ---- set operations -------------------------------------------------------

// union / product produce new codes (semantic construction + verification);
// injection / bijection compare decoded cardinalities exactly.
CodeResult setop_union(const Alpha& a, const FinStructure& fragment, int k,
                       const std::string& v1, const std::string& v2);
CodeResult setop_product(const Alpha& a, const FinStructure& fragment, int k,
                         const std::string& v1, const std::string& v2);
bool setop_injection(const Alpha& a, const FinStructure& fragment, int k,
                     const std::string& v1, const std::string& v2);
bool setop_bijection(const Alpha& a, const FinStructure& fragment, int k,
                     const std::string& v1, const std::string& v2);

// ---- rational representations ---------------------------------------------

struct RepResult {
  FinStructure fragment;
  std::vector<std::string> abar;  // image of the base tuple
};

RepResult build_rational_rep(const RationalFixture& fx, long long p, long long q);

// (chi(B/abar), chi(C/abar)) with the membership conditions enforced.
std::pair<long long, long long> read_rational(const RationalFixture& fx,
                                              const FinStructure& fragment,
                                              const std::vector<std::string>& abar);

bool eval_equiv(const RationalFixture& fx, const FinStructure& fragment,
                const std::vector<std::string>& a1,
                const std::vector<std::string>& a2);
bool eval_order(const RationalFixture& fx, const FinStructure& fragment,
                const std::vector<std::string>& a1,
                const std::vector<std::string>& a2);
bool eval_mul(const RationalFixture& fx, const FinStructure& fragment,
              const std::vector<std::string>& a1,
              const std::vector<std::string>& a2,
              const std::vector<std::string>& a3);
bool eval_add(const RationalFixture& fx, const FinStructure& fragment,
              const std::vector<std::string>& a1,
              const std::vector<std::string>& a2,
              const std::vector<std::string>& a3);

// Formula-level evaluation: basis and product codes are materialized inside
// a working copy of the fragment, the R^k universals are checked by
// first-order evaluation, and the cardinality primitives compare decoded
// families.  Supported for p,q <= 2 and fragments of at most 40 vertices.
bool eval_relation_formula(const RationalFixture& fx, const std::string& kind,
                           const FinStructure& fragment,
                           const std::vector<std::vector<std::string>>& tuples);

// ---- emitted formulas -------------------------------------------------------

// Syntactic interpretation formulas over the coded vocabulary, for shape
// reporting: kinds phi_A, beta, gamma, E, O, M, A.
struct InterpFormula {
  std::string kind;
  nlohmann::json ast;
  int count_ops(const std::string& op) const;
};

InterpFormula emit_formula(const RationalFixture& fx, const std::string& kind);

// ---- density ---------------------------------------------------------------

struct DensityDemo {
  FinStructure fragment;
  std::vector<Rat> values;                         // ascending
  std::vector<std::vector<std::string>> tuples;    // aligned with values
};

// Fragment holding reps of r1, r2 and their mediant, order-certified.
DensityDemo fmp_density_demo(const RationalFixture& fx, const Rat& r1,
                             const Rat& r2);

// Iterated mediant insertion until `count` representatives sit in one
// fragment as a strict order chain.
DensityDemo density_chain(const RationalFixture& fx, const Rat& r1,
                          const Rat& r2, int count);

}  // namespace predimlab
