#pragma once

#include <map>
#include <set>
#include <vector>

#include "core/corpus.hpp"
#include "core/generic.hpp"
#include "core/predimension.hpp"
#include "core/structure.hpp"

namespace pdt {

using namespace predimlab;

inline FinStructure mk(std::vector<std::string> vs,
                       std::vector<std::array<std::string, 3>> ts = {}) {
  return FinStructure(std::move(vs), std::move(ts));
}

inline Alpha al(const std::string& s) { return Alpha::parse(s); }

// ---- independent oracles (kept deliberately naive) ----

// chi by filtering every injective map.
inline long long oracle_copy_count(const FinStructure& m, const FinStructure& ext,
                                   const std::vector<int>& anchor) {
  std::set<Mask> images;
  std::vector<int> map(ext.size(), -1);
  std::function<void(int)> rec = [&](int i) {
    if (i == ext.size()) {
      // filter: injective handled below; check full diagram both ways
      for (int x = 0; x < ext.size(); ++x)
        for (int y = x + 1; y < ext.size(); ++y)
          for (int z = y + 1; z < ext.size(); ++z)
            if (ext.has_triple(x, y, z) !=
                m.has_triple(map[x], map[y], map[z]))
              return;
      Mask img = 0;
      for (int v : map) img |= bit(v);
      images.insert(img);
      return;
    }
    if (anchor[i] >= 0) {
      map[i] = anchor[i];
      for (int j = 0; j < i; ++j)
        if (map[j] == map[i]) return;
      rec(i + 1);
      return;
    }
    for (int cand = 0; cand < m.size(); ++cand) {
      bool clash = false;
      for (int j = 0; j < i; ++j)
        if (map[j] == cand) clash = true;
      for (int j = 0; j < static_cast<int>(anchor.size()); ++j)
        if (anchor[j] == cand && j != i) clash = true;
      if (clash) continue;
      map[i] = cand;
      rec(i + 1);
    }
    map[i] = -1;
  };
  rec(0);
  return static_cast<long long>(images.size());
}

inline Rat oracle_delta(const Alpha& a, const FinStructure& m, Mask sub) {
  FinStructure s = m.substructure(sub);
  return Rat(s.size()) - a.value() * Rat(s.triple_count());
}

template <typename F>
inline void all_submasks_of(Mask diff, F&& f) {
  Mask sub = diff;
  while (true) {
    f(sub);
    if (sub == 0) break;
    sub = (sub - 1) & diff;
  }
}

inline bool oracle_strong(const Alpha& a, const FinStructure& m, Mask amask,
                          Mask bmask, Variant v) {
  bool ok = true;
  Rat da = oracle_delta(a, m, amask);
  all_submasks_of(bmask & ~amask, [&](Mask sub) {
    Rat dc = oracle_delta(a, m, amask | sub);
    if (v == Variant::Strict) {
      if (sub != 0 && !(da < dc)) ok = false;
    } else {
      if (!(da <= dc)) ok = false;
    }
  });
  return ok;
}

inline bool oracle_intrinsic(const Alpha& a, const FinStructure& m, Mask amask,
                             Mask bmask, Variant v) {
  bool ok = true;
  Rat db = oracle_delta(a, m, bmask);
  all_submasks_of(bmask & ~amask, [&](Mask sub) {
    if ((amask | sub) == bmask) return;
    Rat dc = oracle_delta(a, m, amask | sub);
    if (v == Variant::Strict ? !(db <= dc) : !(db < dc)) ok = false;
  });
  return ok;
}

// least strong superset by exhaustive ascending-size search
inline Mask oracle_closure(const Alpha& a, const FinStructure& m, Mask amask,
                           Variant v) {
  Mask best = 0;
  bool have = false;
  Mask rest = m.full_mask() & ~amask;
  for (int size = 0; size <= popcount(rest) && !have; ++size) {
    all_submasks_of(rest, [&](Mask sub) {
      if (popcount(sub) != size) return;
      Mask s = amask | sub;
      if (oracle_strong(a, m, s, m.full_mask(), v)) {
        if (!have) {
          best = s;
          have = true;
        }
      }
    });
  }
  return best;
}

inline std::vector<FinStructure> small_class_corpus(const Alpha& a, Variant v,
                                                    int max_n, int max_t) {
  std::vector<FinStructure> out;
  for (auto& s : all_structures_up_to_iso(max_n, max_t))
    if (in_class(a, s, v)) out.push_back(std::move(s));
  return out;
}

}  // namespace pdt
