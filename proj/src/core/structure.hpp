#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace predimlab {

// Vertex subsets are bitmasks over the structure's (sorted) vertex order.
using Mask = std::uint64_t;
constexpr int kMaxVertices = 64;

inline int popcount(Mask m) { return __builtin_popcountll(m); }
inline Mask bit(int i) { return Mask{1} << i; }

struct Triple {
  std::array<int, 3> v;  // ascending
  Mask mask;
  friend bool operator<(const Triple& a, const Triple& b) { return a.v < b.v; }
  friend bool operator==(const Triple& a, const Triple& b) { return a.v == b.v; }
};

// A finite structure over one symmetric ternary relation: a 3-uniform
// hypergraph with opaque string vertex ids.  Immutable after construction;
// vertices are kept sorted so equal structures compare equal.
class FinStructure {
 public:
  FinStructure() = default;
  FinStructure(std::vector<std::string> vertices,
               std::vector<std::array<std::string, 3>> triples);

  int size() const { return static_cast<int>(names_.size()); }
  int triple_count() const { return static_cast<int>(triples_.size()); }
  bool empty() const { return names_.empty(); }
  const std::vector<std::string>& vertex_names() const { return names_; }
  const std::string& name(int i) const { return names_[i]; }
  int index_of(const std::string& name) const;  // -1 when absent
  bool has_vertex(const std::string& name) const { return index_of(name) >= 0; }
  const std::vector<Triple>& triples() const { return triples_; }
  bool has_triple(int a, int b, int c) const;
  Mask full_mask() const {
    return names_.empty() ? 0 : (names_.size() == 64 ? ~Mask{0} : bit(size()) - 1);
  }

  int triples_within(Mask m) const;
  int triples_touching(Mask m) const;  // at least one node inside m

  FinStructure substructure(Mask m) const;
  FinStructure substructure(const std::vector<std::string>& names) const;

  Mask mask_of(const std::vector<std::string>& names) const;
  std::vector<std::string> names_of(Mask m) const;

  static FinStructure from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  // Isomorphism-invariant canonical encoding, and a vertex order realizing it.
  std::string canonical_form() const;
  std::vector<int> canonical_order() const;

  friend bool operator==(const FinStructure& a, const FinStructure& b) {
    return a.names_ == b.names_ && a.triples_ == b.triples_;
  }

 private:
  void finish(std::vector<std::array<int, 3>> raw);

  std::vector<std::string> names_;  // sorted, unique
  std::vector<Triple> triples_;     // sorted, unique
};

struct Embedding {
  FinStructure source;
  FinStructure target;
  std::vector<int> map;  // source index -> target index

  bool valid() const;
  Mask image_mask() const;
};

// free_join(B, A, C): A induced in both B and C, B and C overlap exactly in A.
FinStructure free_join(const FinStructure& b, const FinStructure& a,
                       const FinStructure& c);

// No triple of `ambient` has a node in B\A and a node in C\A.
bool is_free(const FinStructure& ambient, Mask bmask, Mask amask, Mask cmask);

// All induced embeddings of `ext` into `m` completing the partial map
// `anchor` (anchor[i] = m-index of ext vertex i, or -1 for unanchored),
// deduplicated by image.  Returns completed maps.
std::vector<std::vector<int>> enumerate_copy_maps(const FinStructure& m,
                                                  const FinStructure& ext,
                                                  const std::vector<int>& anchor);

// chi_M(B/A): number of distinct copies (images) of `ext` over the anchor.
long long count_copies(const FinStructure& m, const FinStructure& ext,
                       const std::vector<int>& anchor);

// Same search without the image deduplication: every embedding map.
std::vector<std::vector<int>> enumerate_embeddings(const FinStructure& m,
                                                   const FinStructure& ext,
                                                   const std::vector<int>& anchor);

// Spec-level helper: copies of B over an embedded base A.
// base_in_ext / base_in_m name the common part by vertex id.
std::vector<Embedding> enumerate_copies(const FinStructure& m,
                                        const FinStructure& ext,
                                        const std::vector<std::string>& base_in_ext,
                                        const std::vector<std::string>& base_in_m);

std::optional<std::vector<int>> isomorphic(const FinStructure& a,
                                           const FinStructure& b);

// Isomorphism fixing the anchored vertices pointwise (indices into b).
bool isomorphic_over(const FinStructure& a, const FinStructure& b,
                     const std::vector<int>& base_a, const std::vector<int>& base_b);

}  // namespace predimlab
