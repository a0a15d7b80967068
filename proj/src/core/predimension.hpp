#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "rational.hpp"
#include "structure.hpp"

namespace predimlab {

// The predimension parameter: an exact rational in (0, 1].
class Alpha {
 public:
  explicit Alpha(Rat v) : v_(v) {
    if (!(Rat(0) < v_ && v_ <= Rat(1)))
      fail(Errc::invalid_argument, "alpha must lie in (0,1], got " + v.str());
  }
  static Alpha parse(const std::string& s) { return Alpha(Rat::parse(s)); }
  const Rat& value() const { return v_; }
  std::int64_t p() const { return v_.num(); }  // reduced
  std::int64_t q() const { return v_.den(); }
  std::string str() const { return v_.str(); }
  friend bool operator==(const Alpha& a, const Alpha& b) { return a.v_ == b.v_; }

 private:
  Rat v_;
};

// NonStrict is the <=_a family, Strict the <=*_a family; the derived
// intrinsic relations and closures follow the same split.
enum class Variant { NonStrict, Strict };

inline const char* variant_name(Variant v) {
  return v == Variant::Strict ? "strict" : "nonstrict";
}

// delta_a restricted to a vertex subset of m (triples induced).
Rat delta(const Alpha& a, const FinStructure& m, Mask sub);
inline Rat delta(const Alpha& a, const FinStructure& m) {
  return delta(a, m, m.full_mask());
}

// delta(B) - delta(A), both inside m.  Requires amask within bmask.
Rat delta_rel(const Alpha& a, const FinStructure& m, Mask bmask, Mask amask);

// A <= B resp. A <=* B, with A,B subsets of m given by masks.
bool is_strong(const Alpha& a, const FinStructure& m, Mask amask, Mask bmask,
               Variant v);

// A <=_i B resp. A <=*_i B (concrete predimension form).
bool is_intrinsic(const Alpha& a, const FinStructure& m, Mask amask, Mask bmask,
                  Variant v);

bool is_minimal_pair(const Alpha& a, const FinStructure& m, Mask amask,
                     Mask bmask, Variant v);

// Decomposition of an intrinsic extension into minimal-pair steps
// (masks from amask to bmask inclusive).
std::vector<Mask> minimal_pair_chain(const Alpha& a, const FinStructure& m,
                                     Mask amask, Mask bmask, Variant v);

// cl / cl* of amask inside m; `bound` n restricts to intrinsic extensions
// with fewer than n new vertices (the paper's cl^n).
//
// witness_cap caps the size of the violating extensions searched per
// fixpoint step (0 = unbounded, exact everywhere).  Size-minimal violations
// are confined to a single block in structures assembled by free joins of
// blocks with at most witness_cap new vertices, so chain stages may pass a
// small cap without losing exactness.
Mask closure_mask(const Alpha& a, const FinStructure& m, Mask amask, Variant v,
                  std::optional<int> bound = std::nullopt, int witness_cap = 0);

// Membership in C+ (NonStrict) or C*+ (Strict).
bool in_class(const Alpha& a, const FinStructure& s, Variant v,
              int witness_cap = 0);
bool in_class(const Alpha& a, const FinStructure& m, Mask sub, Variant v);

struct MuBound {
  Rat classic;          // delta(A) / (-delta(B/A)); the bound we assert
  Rat paper_displayed;  // delta(A) / (alpha * |R^{B/A}|); reported only
};
MuBound mu_bound(const Alpha& a, const FinStructure& m, Mask amask, Mask bmask);

// Largest copy count admitted by the classic bound: chi < classic.
long long mu_eta(const Alpha& a, const FinStructure& m, Mask amask, Mask bmask);

// A strictly decreasing rational sequence a_n -> limit with a_n > limit.
// Default rule: a_n = limit + 1/(n+c).
struct SequenceSpec {
  Rat limit;
  std::int64_t c = 3;
  std::vector<Rat> explicit_terms;  // overrides the rule when nonempty

  Rat term(int n) const;
  void validate() const;
  static SequenceSpec parse(const std::string& limit_str,
                            const std::string& rule);
};

struct ThresholdResult {
  bool found = false;
  int n = -1;
  int horizon = 0;
  int window = 0;
};

// Least n such that the property holds at alpha_m for all m in
// [n, n+window]; scans upward, never assumes monotonicity.
ThresholdResult stabilization_threshold(
    const SequenceSpec& seq, const std::function<bool(const Alpha&)>& property,
    const std::function<bool()>& holds_at_limit, int horizon = 64,
    int window = 8);

// Helpers shared by closure-style searches: enumerate connected nonempty
// vertex sets T within `allowed` (adjacency = sharing a triple of m),
// grouped by ascending size; calls visit(T) and stops when it returns true.
bool for_each_connected_set(const FinStructure& m, Mask allowed, int max_size,
                            const std::function<bool(Mask)>& visit);

constexpr int kIntermediateCap = 16;  // subset sweeps beyond this throw

}  // namespace predimlab
