#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "predimension.hpp"
#include "structure.hpp"

namespace predimlab {

// A request to realize B over a strong copy of its designated base inside
// the latest stage.  base_in_ext / base_in_stage are aligned name lists.
struct ExtensionRequest {
  FinStructure ext;
  std::vector<std::string> base_in_ext;
  std::vector<std::string> base_in_stage;
  int enqueued_at_stage = 0;
};

struct LogEntry {
  int stage_index;  // stage the request was satisfied against
  std::vector<std::string> base_in_stage;
  FinStructure ext;
  std::vector<std::string> base_in_ext;
  int satisfied_at;  // index of the stage created by this amalgamation
};

// A growing approximation of the generic structure: a strictly strong chain
// of class members, together with the request log and unsatisfied backlog.
struct Chain {
  Alpha alpha;
  std::vector<FinStructure> stages;
  std::vector<LogEntry> log;
  std::vector<ExtensionRequest> backlog;

  const FinStructure& last() const { return stages.back(); }
  nlohmann::json to_json() const;
  static Chain from_json(const nlohmann::json& j);
};

// Free amalgamation of one request onto the latest stage.  Re-validates the
// base (stale requests are rejected, not repaired), verifies the new stage
// stays in the class and that both the old stage and the fresh copy sit
// strictly strongly inside it.
FinStructure amalgamate(const Alpha& a, const FinStructure& stage,
                        const ExtensionRequest& req,
                        const std::string& fresh_prefix);

struct BuildBudget {
  int steps = 8;
  int max_vertices = 40;
  int max_ext_size = 3;  // catalog cap on |B|
};

Chain build_generic(const Alpha& a, const BuildBudget& budget,
                    std::uint64_t seed);

struct CatalogEntry {
  FinStructure ext;
  std::vector<std::string> base_in_ext;
};

struct GenericityRow {
  int entry_index;
  std::vector<std::string> base_image;
  bool satisfied;
};

struct GenericityReport {
  std::vector<GenericityRow> rows;
  bool all_satisfied() const {
    for (const auto& r : rows)
      if (!r.satisfied) return false;
    return true;
  }
};

GenericityReport check_genericity(const Alpha& a, const FinStructure& stage,
                                  const std::vector<CatalogEntry>& catalog);

// Semigenericity instance check: some embedding of B extending g has its
// n-bounded closure equal to the stated free join.
bool check_semigeneric(const Alpha& a, const FinStructure& m,
                       const FinStructure& ext,
                       const std::vector<std::string>& base_in_ext,
                       const std::vector<std::string>& base_in_m, int n);

enum class OldNew { Old, New };

// Pre: AB intrinsic-extended to C (per variant) inside m.
OldNew classify_old_new(const Alpha& a, const FinStructure& m, Mask amask,
                        Mask bmask, Mask cmask, Variant v);

struct ZeroGadgetOptions {
  int multiplier = 1;      // first k tried: k*p new vertices, k*q triples
  int max_multiplier = 1;  // search stops after this k
  std::vector<int> exclude_new_sizes;    // skip gadgets with this many vertices
  std::vector<FinStructure> exclude_iso_over_base;  // reject B isomorphic over A
  std::string fresh_prefix = "w";
  long long search_cap = 2000000;
  bool cover_base = false;  // require gadget triples to touch every base vertex
  std::function<bool(const FinStructure&)> accept;  // extra filter
};

// Smallest-first search for B over A with delta(B/A) = 0 forming a strict
// minimal pair, staying inside C*+.
FinStructure zero_minimal_pair(const Alpha& a, const FinStructure& base,
                               const ZeroGadgetOptions& opts = {});

}  // namespace predimlab
