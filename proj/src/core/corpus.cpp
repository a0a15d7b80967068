#include "corpus.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace predimlab {

namespace {

std::vector<std::string> default_names(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("v" + std::to_string(i));
  return out;
}

std::vector<std::array<int, 3>> all_index_triples(int n) {
  std::vector<std::array<int, 3>> out;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) out.push_back({a, b, c});
  return out;
}

FinStructure build_from_indices(int n, const std::vector<std::array<int, 3>>& ts) {
  auto names = default_names(n);
  std::vector<std::array<std::string, 3>> named;
  for (const auto& t : ts)
    named.push_back({names[t[0]], names[t[1]], names[t[2]]});
  return FinStructure(names, named);
}

}  // namespace

std::vector<FinStructure> all_structures_up_to_iso(
    int max_n, std::optional<int> max_triples) {
  std::vector<FinStructure> out;
  std::set<std::string> seen;
  for (int n = 0; n <= max_n; ++n) {
    auto pool = all_index_triples(n);
    int tcap = max_triples ? std::min<int>(*max_triples, pool.size())
                           : static_cast<int>(pool.size());
    // enumerate triple subsets by size, lexicographic within each size
    std::vector<int> pick;
    std::function<void(int, int)> rec = [&](int start, int want) {
      if (want == 0) {
        std::vector<std::array<int, 3>> ts;
        for (int i : pick) ts.push_back(pool[i]);
        FinStructure s = build_from_indices(n, ts);
        if (seen.insert(s.canonical_form()).second) out.push_back(s);
        return;
      }
      for (int i = start; i + want <= static_cast<int>(pool.size()); ++i) {
        pick.push_back(i);
        rec(i + 1, want - 1);
        pick.pop_back();
      }
    };
    for (int k = 0; k <= tcap; ++k) rec(0, k);
  }
  return out;
}

FinStructure random_class_structure(const Alpha& a, Variant v, Rng& rng,
                                    int max_vertices, int max_triples) {
  for (int attempt = 0; attempt < 4096; ++attempt) {
    int n = 1 + static_cast<int>(rng.below(max_vertices));
    auto pool = all_index_triples(n);
    std::vector<std::array<int, 3>> ts;
    if (!pool.empty()) {
      int want = static_cast<int>(rng.below(max_triples + 1));
      for (int k = 0; k < want; ++k)
        ts.push_back(pool[rng.below(pool.size())]);
    }
    FinStructure s = build_from_indices(n, ts);
    if (in_class(a, s, v)) return s;
  }
  fail(Errc::search_exhausted, "random corpus generation kept leaving the class");
}

std::vector<FinStructure> generate_corpus(const Alpha& a, Variant v,
                                          const CorpusSpec& spec) {
  std::vector<FinStructure> out;
  for (auto& s : all_structures_up_to_iso(spec.catalog_max_vertices,
                                          spec.catalog_max_triples))
    if (in_class(a, s, v)) out.push_back(std::move(s));
  Rng rng(spec.seed);
  for (int i = 0; i < spec.random_count; ++i)
    out.push_back(random_class_structure(a, v, rng, spec.random_max_vertices,
                                         spec.random_max_triples));
  return out;
}

}  // namespace predimlab
