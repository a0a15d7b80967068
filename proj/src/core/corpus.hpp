#pragma once

#include <optional>
#include <vector>

#include "predimension.hpp"
#include "rng.hpp"
#include "structure.hpp"

namespace predimlab {

// All structures with up to max_n vertices (and, when given, up to
// max_triples triples), one representative per isomorphism type, in a
// deterministic order.  Vertices are named v0, v1, ...
std::vector<FinStructure> all_structures_up_to_iso(
    int max_n, std::optional<int> max_triples = std::nullopt);

struct CorpusSpec {
  std::uint64_t seed = 1;
  int random_count = 100;
  int random_max_vertices = 9;
  int random_max_triples = 7;
  int catalog_max_vertices = 6;
  int catalog_max_triples = 4;
};

// Deterministic catalog (class-filtered) plus seeded random members of the
// class.  Identical spec gives an identical corpus.
std::vector<FinStructure> generate_corpus(const Alpha& a, Variant v,
                                          const CorpusSpec& spec);

// One seeded random structure in the class (retries until it lands inside).
FinStructure random_class_structure(const Alpha& a, Variant v, Rng& rng,
                                    int max_vertices, int max_triples);

}  // namespace predimlab
