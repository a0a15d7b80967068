#include "structure.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace predimlab {

FinStructure::FinStructure(std::vector<std::string> vertices,
                           std::vector<std::array<std::string, 3>> triples) {
  std::sort(vertices.begin(), vertices.end());
  for (size_t i = 1; i < vertices.size(); ++i)
    if (vertices[i] == vertices[i - 1])
      fail(Errc::invalid_argument, "duplicate vertex id '" + vertices[i] + "'");
  if (vertices.size() > kMaxVertices)
    fail(Errc::size_cap, "structure exceeds " + std::to_string(kMaxVertices) +
                             " vertices");
  names_ = std::move(vertices);

  std::vector<std::array<int, 3>> raw;
  raw.reserve(triples.size());
  for (const auto& t : triples) {
    std::array<int, 3> ix;
    for (int k = 0; k < 3; ++k) {
      ix[k] = index_of(t[k]);
      if (ix[k] < 0)
        fail(Errc::invalid_argument, "triple uses unknown vertex '" + t[k] + "'");
    }
    raw.push_back(ix);
  }
  finish(std::move(raw));
}

void FinStructure::finish(std::vector<std::array<int, 3>> raw) {
  triples_.clear();
  for (auto ix : raw) {
    std::sort(ix.begin(), ix.end());
    if (ix[0] == ix[1] || ix[1] == ix[2])
      fail(Errc::invalid_argument, "triple repeats a vertex");
    triples_.push_back(Triple{ix, bit(ix[0]) | bit(ix[1]) | bit(ix[2])});
  }
  std::sort(triples_.begin(), triples_.end());
  triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());
}

int FinStructure::index_of(const std::string& name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) return -1;
  return static_cast<int>(it - names_.begin());
}

bool FinStructure::has_triple(int a, int b, int c) const {
  std::array<int, 3> ix{a, b, c};
  std::sort(ix.begin(), ix.end());
  Triple probe{ix, 0};
  auto it = std::lower_bound(triples_.begin(), triples_.end(), probe);
  return it != triples_.end() && it->v == ix;
}

int FinStructure::triples_within(Mask m) const {
  int n = 0;
  for (const auto& t : triples_)
    if ((t.mask & ~m) == 0) ++n;
  return n;
}

int FinStructure::triples_touching(Mask m) const {
  int n = 0;
  for (const auto& t : triples_)
    if (t.mask & m) ++n;
  return n;
}

FinStructure FinStructure::substructure(Mask m) const {
  if (m & ~full_mask()) fail(Errc::invalid_argument, "mask outside structure");
  FinStructure out;
  std::vector<int> remap(names_.size(), -1);
  for (int i = 0; i < size(); ++i)
    if (m & bit(i)) {
      remap[i] = static_cast<int>(out.names_.size());
      out.names_.push_back(names_[i]);
    }
  std::vector<std::array<int, 3>> raw;
  for (const auto& t : triples_)
    if ((t.mask & ~m) == 0)
      raw.push_back({remap[t.v[0]], remap[t.v[1]], remap[t.v[2]]});
  out.finish(std::move(raw));
  return out;
}

FinStructure FinStructure::substructure(const std::vector<std::string>& names) const {
  return substructure(mask_of(names));
}

Mask FinStructure::mask_of(const std::vector<std::string>& names) const {
  Mask m = 0;
  for (const auto& n : names) {
    int i = index_of(n);
    if (i < 0) fail(Errc::invalid_argument, "unknown vertex id '" + n + "'");
    m |= bit(i);
  }
  return m;
}

std::vector<std::string> FinStructure::names_of(Mask m) const {
  std::vector<std::string> out;
  for (int i = 0; i < size(); ++i)
    if (m & bit(i)) out.push_back(names_[i]);
  return out;
}

FinStructure FinStructure::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("vertices") || !j.contains("triples"))
    fail(Errc::parse, "structure json needs 'vertices' and 'triples'");
  std::vector<std::string> vs;
  for (const auto& v : j.at("vertices")) vs.push_back(v.get<std::string>());
  std::vector<std::array<std::string, 3>> ts;
  for (const auto& t : j.at("triples")) {
    if (!t.is_array() || t.size() != 3) fail(Errc::parse, "triple must have 3 vertices");
    ts.push_back({t[0].get<std::string>(), t[1].get<std::string>(),
                  t[2].get<std::string>()});
  }
  return FinStructure(std::move(vs), std::move(ts));
}

nlohmann::json FinStructure::to_json() const {
  nlohmann::json j;
  j["vertices"] = names_;
  std::vector<std::array<std::string, 3>> ts;
  for (const auto& t : triples_)
    ts.push_back({names_[t.v[0]], names_[t.v[1]], names_[t.v[2]]});
  std::sort(ts.begin(), ts.end());
  j["triples"] = ts;
  return j;
}

namespace {

// Fixed-width rendering so string order equals numeric tuple order.
inline void append_pos(std::string& out, int p) {
  out += static_cast<char>('0' + p / 10);
  out += static_cast<char>('0' + p % 10);
}

// Equitable-refinement colors for the 3-uniform hypergraph.
std::vector<int> refine_colors(const FinStructure& s, std::vector<int> color) {
  const int n = s.size();
  for (int round = 0; round < n + 1; ++round) {
    std::vector<std::pair<std::vector<long long>, int>> sig(n);
    for (int v = 0; v < n; ++v) {
      std::vector<long long> key;
      key.push_back(color[v]);
      std::vector<long long> inc;
      for (const auto& t : s.triples())
        if (t.mask & bit(v)) {
          int a = -1, b = -1;
          for (int k = 0; k < 3; ++k)
            if (t.v[k] != v) (a < 0 ? a : b) = t.v[k];
          long long lo = std::min(color[a], color[b]);
          long long hi = std::max(color[a], color[b]);
          inc.push_back(lo * 1000003LL + hi);
        }
      std::sort(inc.begin(), inc.end());
      key.insert(key.end(), inc.begin(), inc.end());
      sig[v] = {std::move(key), v};
    }
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return sig[a].first < sig[b].first;
    });
    std::vector<int> next(n);
    int c = 0;
    for (int i = 0; i < n; ++i) {
      if (i > 0 && sig[order[i]].first != sig[order[i - 1]].first) ++c;
      next[order[i]] = c;
    }
    if (next == color) break;
    color = std::move(next);
  }
  return color;
}

// Encodes the triple set under a vertex order.  Triples are sorted by
// (max position, min, mid), so the triples contained in the first k placed
// vertices are a literal prefix of the full encoding; prefix comparisons in
// the search below are then sound.
std::string encode_prefix(const FinStructure& s, const std::vector<int>& pos,
                          int placed) {
  std::vector<std::array<int, 3>> ts;
  for (const auto& t : s.triples()) {
    std::array<int, 3> u{pos[t.v[0]], pos[t.v[1]], pos[t.v[2]]};
    std::sort(u.begin(), u.end());
    if (u[2] >= placed) continue;
    ts.push_back({u[2], u[0], u[1]});
  }
  std::sort(ts.begin(), ts.end());
  std::string out;
  for (const auto& u : ts) {
    append_pos(out, u[0]);
    append_pos(out, u[1]);
    append_pos(out, u[2]);
    out += ';';
  }
  return out;
}

std::string encode_under(const FinStructure& s, const std::vector<int>& pos) {
  std::string out = std::to_string(s.size()) + "|";
  out += encode_prefix(s, pos, s.size());
  return out;
}

struct CanonSearch {
  const FinStructure& s;
  std::vector<int> base_color;
  std::vector<int> best_order;  // order[k] = vertex placed at position k
  std::string best_encoding;
  bool have_best = false;

  explicit CanonSearch(const FinStructure& str) : s(str) {
    base_color = refine_colors(s, std::vector<int>(s.size(), 0));
  }

  void run() {
    const int n = s.size();
    std::vector<int> order;
    std::vector<int> pos(n, n);  // unplaced sit at position n
    std::vector<bool> used(n, false);
    dfs(order, pos, used);
    if (!have_best) {  // n == 0
      best_order.clear();
      best_encoding = encode_under(s, {});
    }
  }

  void dfs(std::vector<int>& order, std::vector<int>& pos,
           std::vector<bool>& used) {
    const int n = s.size();
    int placed = static_cast<int>(order.size());
    if (placed == n) {
      std::string enc = encode_under(s, pos);
      if (!have_best || enc < best_encoding) {
        best_encoding = enc;
        best_order = order;
        best_pos_ = pos;
        have_best = true;
      }
      return;
    }
    // Candidates: lowest refined color among unplaced, then all members of
    // that class.  Members with an identical placement signature explore
    // identical subtrees, so only one representative per signature recurses.
    int pick_color = -1;
    for (int v = 0; v < n; ++v)
      if (!used[v] && (pick_color < 0 || base_color[v] < pick_color))
        pick_color = base_color[v];
    std::set<std::string> seen_sig;
    for (int v = 0; v < n; ++v) {
      if (used[v] || base_color[v] != pick_color) continue;
      std::string sig;
      for (const auto& t : s.triples())
        if (t.mask & bit(v)) {
          std::array<int, 2> other{};
          int k2 = 0;
          for (int k = 0; k < 3; ++k)
            if (t.v[k] != v) other[k2++] = t.v[k];
          int pa = used[other[0]] ? pos[other[0]] : -1 - base_color[other[0]];
          int pb = used[other[1]] ? pos[other[1]] : -1 - base_color[other[1]];
          if (pa > pb) std::swap(pa, pb);
          sig += std::to_string(pa) + ":" + std::to_string(pb) + ";";
        }
      // NOTE: signature dedup is a heuristic accelerator only when the two
      // candidates are genuinely interchangeable; to stay exact we dedup only
      // candidates with no incident triples (always interchangeable).
      bool isolated = sig.empty();
      if (isolated) {
        if (seen_sig.count("")) continue;
        seen_sig.insert("");
      }
      order.push_back(v);
      pos[v] = placed;
      used[v] = true;
      bool prune = false;
      if (have_best) {
        std::string penc = encode_prefix(s, pos, placed + 1);
        std::string bpenc = encode_prefix(s, best_pos_, placed + 1);
        if (penc > bpenc) prune = true;
      }
      if (!prune) dfs(order, pos, used);
      order.pop_back();
      pos[v] = n;
      used[v] = false;
    }
  }

  std::vector<int> best_pos_;
};

}  // namespace

std::vector<int> FinStructure::canonical_order() const {
  CanonSearch cs(*this);
  cs.run();
  return cs.best_order;
}

std::string FinStructure::canonical_form() const {
  CanonSearch cs(*this);
  cs.run();
  return cs.best_encoding;
}

bool Embedding::valid() const {
  if (static_cast<int>(map.size()) != source.size()) return false;
  std::vector<bool> hit(target.size(), false);
  for (int i : map) {
    if (i < 0 || i >= target.size() || hit[i]) return false;
    hit[i] = true;
  }
  for (int a = 0; a < source.size(); ++a)
    for (int b = a + 1; b < source.size(); ++b)
      for (int c = b + 1; c < source.size(); ++c)
        if (source.has_triple(a, b, c) != target.has_triple(map[a], map[b], map[c]))
          return false;
  return true;
}

Mask Embedding::image_mask() const {
  Mask m = 0;
  for (int i : map) m |= bit(i);
  return m;
}

FinStructure free_join(const FinStructure& b, const FinStructure& a,
                       const FinStructure& c) {
  // A induced in both sides, and the sides overlap exactly in A.
  for (const auto& n : a.vertex_names()) {
    if (!b.has_vertex(n) || !c.has_vertex(n))
      fail(Errc::precondition, "free_join: base vertex '" + n + "' missing");
  }
  auto check_induced = [&](const FinStructure& side, const char* which) {
    FinStructure ind = side.substructure(side.mask_of(a.vertex_names()));
    if (!(ind == a))
      fail(Errc::precondition,
           std::string("free_join: base not induced in ") + which);
  };
  check_induced(b, "B");
  check_induced(c, "C");
  for (const auto& n : b.vertex_names())
    if (c.has_vertex(n) && !a.has_vertex(n))
      fail(Errc::precondition, "free_join: overlap beyond base at '" + n + "'");

  std::vector<std::string> vs = b.vertex_names();
  for (const auto& n : c.vertex_names())
    if (!b.has_vertex(n)) vs.push_back(n);
  std::vector<std::array<std::string, 3>> ts;
  auto add_triples = [&](const FinStructure& s) {
    for (const auto& t : s.triples())
      ts.push_back({s.name(t.v[0]), s.name(t.v[1]), s.name(t.v[2])});
  };
  add_triples(b);
  add_triples(c);
  return FinStructure(std::move(vs), std::move(ts));
}

bool is_free(const FinStructure& ambient, Mask bmask, Mask amask, Mask cmask) {
  if ((amask & ~bmask) || (amask & ~cmask))
    fail(Errc::precondition, "is_free: A not contained in both sides");
  if ((bmask & cmask) != amask)
    fail(Errc::precondition, "is_free: sides overlap beyond A");
  Mask bn = bmask & ~amask, cn = cmask & ~amask;
  for (const auto& t : ambient.triples())
    if ((t.mask & bn) && (t.mask & cn)) return false;
  return true;
}

namespace {

void copy_dfs(const FinStructure& m, const FinStructure& ext,
              std::vector<int>& map, Mask used, size_t next,
              const std::vector<int>& free_order,
              std::vector<std::vector<int>>& out, std::set<Mask>* images) {
  if (next == free_order.size()) {
    if (images) {
      Mask img = 0;
      for (int i : map) img |= bit(i);
      if (!images->insert(img).second) return;
    }
    out.push_back(map);
    return;
  }
  int v = free_order[next];
  for (int cand = 0; cand < m.size(); ++cand) {
    if (used & bit(cand)) continue;
    map[v] = cand;
    // check all triples of ext among assigned vertices against m, both ways
    bool ok = true;
    for (int a = 0; a < ext.size() && ok; ++a) {
      if (map[a] < 0 || a == v) continue;
      for (int b = a + 1; b < ext.size() && ok; ++b) {
        if (map[b] < 0 || b == v) continue;
        if (ext.has_triple(a, b, v) != m.has_triple(map[a], map[b], cand))
          ok = false;
      }
    }
    if (ok) {
      copy_dfs(m, ext, map, used | bit(cand), next + 1, free_order, out, images);
    }
    map[v] = -1;
  }
}

}  // namespace

namespace {

std::vector<std::vector<int>> copy_search(const FinStructure& m,
                                          const FinStructure& ext,
                                          const std::vector<int>& anchor,
                                          bool dedup_by_image) {
  if (static_cast<int>(anchor.size()) != ext.size())
    fail(Errc::invalid_argument, "anchor length mismatch");
  std::vector<int> map = anchor;
  Mask used = 0;
  for (int i = 0; i < ext.size(); ++i) {
    if (map[i] < 0) continue;
    if (map[i] >= m.size() || (used & bit(map[i])))
      fail(Errc::precondition, "anchor not injective into M");
    used |= bit(map[i]);
  }
  // anchored part must already respect the diagram
  for (int a = 0; a < ext.size(); ++a)
    for (int b = a + 1; b < ext.size(); ++b)
      for (int c = b + 1; c < ext.size(); ++c) {
        if (map[a] < 0 || map[b] < 0 || map[c] < 0) continue;
        if (ext.has_triple(a, b, c) != m.has_triple(map[a], map[b], map[c]))
          return {};
      }
  std::vector<int> free_order;
  for (int i = 0; i < ext.size(); ++i)
    if (map[i] < 0) free_order.push_back(i);
  std::vector<std::vector<int>> out;
  std::set<Mask> images;
  copy_dfs(m, ext, map, used, 0, free_order, out,
           dedup_by_image ? &images : nullptr);
  return out;
}

}  // namespace

std::vector<std::vector<int>> enumerate_copy_maps(const FinStructure& m,
                                                  const FinStructure& ext,
                                                  const std::vector<int>& anchor) {
  return copy_search(m, ext, anchor, true);
}

std::vector<std::vector<int>> enumerate_embeddings(const FinStructure& m,
                                                   const FinStructure& ext,
                                                   const std::vector<int>& anchor) {
  return copy_search(m, ext, anchor, false);
}

long long count_copies(const FinStructure& m, const FinStructure& ext,
                       const std::vector<int>& anchor) {
  return static_cast<long long>(enumerate_copy_maps(m, ext, anchor).size());
}

std::vector<Embedding> enumerate_copies(const FinStructure& m,
                                        const FinStructure& ext,
                                        const std::vector<std::string>& base_in_ext,
                                        const std::vector<std::string>& base_in_m) {
  if (base_in_ext.size() != base_in_m.size())
    fail(Errc::invalid_argument, "base name lists differ in length");
  std::vector<int> anchor(ext.size(), -1);
  for (size_t k = 0; k < base_in_ext.size(); ++k) {
    int i = ext.index_of(base_in_ext[k]);
    int j = m.index_of(base_in_m[k]);
    if (i < 0 || j < 0) fail(Errc::invalid_argument, "unknown base vertex");
    anchor[i] = j;
  }
  std::vector<Embedding> out;
  for (auto& mp : enumerate_copy_maps(m, ext, anchor))
    out.push_back(Embedding{ext, m, std::move(mp)});
  return out;
}

std::optional<std::vector<int>> isomorphic(const FinStructure& a,
                                           const FinStructure& b) {
  if (a.size() != b.size() || a.triple_count() != b.triple_count())
    return std::nullopt;
  if (a.canonical_form() != b.canonical_form()) return std::nullopt;
  auto oa = a.canonical_order();  // oa[k] = a-vertex at canonical position k
  auto ob = b.canonical_order();
  std::vector<int> map(a.size(), -1);
  for (int k = 0; k < a.size(); ++k) map[oa[k]] = ob[k];
  Embedding e{a, b, map};
  if (!e.valid())
    fail(Errc::invalid_argument, "canonical forms matched but bijection failed");
  return map;
}

bool isomorphic_over(const FinStructure& a, const FinStructure& b,
                     const std::vector<int>& base_a,
                     const std::vector<int>& base_b) {
  if (a.size() != b.size() || base_a.size() != base_b.size()) return false;
  std::vector<int> anchor(a.size(), -1);
  for (size_t k = 0; k < base_a.size(); ++k) anchor[base_a[k]] = base_b[k];
  auto maps = enumerate_copy_maps(b, a, anchor);
  return !maps.empty();
}

}  // namespace predimlab
