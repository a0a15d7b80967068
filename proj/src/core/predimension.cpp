#include "predimension.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace predimlab {

Rat delta(const Alpha& a, const FinStructure& m, Mask sub) {
  return Rat(popcount(sub)) - a.value() * Rat(m.triples_within(sub));
}

Rat delta_rel(const Alpha& a, const FinStructure& m, Mask bmask, Mask amask) {
  if (amask & ~bmask) fail(Errc::precondition, "delta_rel: base not inside B");
  return delta(a, m, bmask) - delta(a, m, amask);
}

namespace {

void check_sweep_size(Mask diff) {
  if (popcount(diff) > kIntermediateCap)
    fail(Errc::size_cap, "intermediate sweep over " +
                             std::to_string(popcount(diff)) +
                             " vertices exceeds cap " +
                             std::to_string(kIntermediateCap));
}

// Visits every submask of diff (including 0 and diff itself).
template <typename F>
bool all_submasks(Mask diff, F&& pred) {
  Mask sub = diff;
  while (true) {
    if (!pred(sub)) return false;
    if (sub == 0) break;
    sub = (sub - 1) & diff;
  }
  return true;
}

}  // namespace

bool is_strong(const Alpha& a, const FinStructure& m, Mask amask, Mask bmask,
               Variant v) {
  if (amask & ~bmask) fail(Errc::precondition, "is_strong: A not inside B");
  Mask diff = bmask & ~amask;
  check_sweep_size(diff);
  Rat da = delta(a, m, amask);
  return all_submasks(diff, [&](Mask sub) {
    if (v == Variant::Strict && sub == 0) return true;
    Rat dc = delta(a, m, amask | sub);
    return v == Variant::Strict ? da < dc : da <= dc;
  });
}

bool is_intrinsic(const Alpha& a, const FinStructure& m, Mask amask, Mask bmask,
                  Variant v) {
  if (amask & ~bmask) fail(Errc::precondition, "is_intrinsic: A not inside B");
  Mask diff = bmask & ~amask;
  check_sweep_size(diff);
  Rat db = delta(a, m, bmask);
  return all_submasks(diff, [&](Mask sub) {
    if (sub == diff) return true;  // proper intermediates only
    Rat dc = delta(a, m, amask | sub);
    return v == Variant::Strict ? db <= dc : db < dc;
  });
}

bool is_minimal_pair(const Alpha& a, const FinStructure& m, Mask amask,
                     Mask bmask, Variant v) {
  if (amask & ~bmask) fail(Errc::precondition, "is_minimal_pair: A not inside B");
  if (amask == bmask) fail(Errc::precondition, "is_minimal_pair: A equals B");
  Mask diff = bmask & ~amask;
  check_sweep_size(diff);
  Rat da = delta(a, m, amask);
  Rat db = delta(a, m, bmask);
  // strongness fails at B itself, holds at every proper intermediate
  bool top = v == Variant::Strict ? db <= da : db < da;
  if (!top) return false;
  return all_submasks(diff, [&](Mask sub) {
    if (sub == 0 || sub == diff) return true;
    Rat dd = delta(a, m, amask | sub);
    return v == Variant::Strict ? dd > da : dd >= da;
  });
}

namespace {

bool chain_dfs(const Alpha& a, const FinStructure& m, Mask cur, Mask bmask,
               Variant v, std::set<Mask>& dead, std::vector<Mask>& chain) {
  if (cur == bmask) return true;
  if (dead.count(cur)) return false;
  Mask rest = bmask & ~cur;
  // candidate steps by ascending size
  std::vector<Mask> cands;
  all_submasks(rest, [&](Mask sub) {
    if (sub != 0) cands.push_back(sub);
    return true;
  });
  std::sort(cands.begin(), cands.end(), [](Mask x, Mask y) {
    int px = popcount(x), py = popcount(y);
    return px != py ? px < py : x < y;
  });
  for (Mask step : cands) {
    if (!is_minimal_pair(a, m, cur, cur | step, v)) continue;
    chain.push_back(cur | step);
    if (chain_dfs(a, m, cur | step, bmask, v, dead, chain)) return true;
    chain.pop_back();
  }
  dead.insert(cur);
  return false;
}

}  // namespace

std::vector<Mask> minimal_pair_chain(const Alpha& a, const FinStructure& m,
                                     Mask amask, Mask bmask, Variant v) {
  if (!is_intrinsic(a, m, amask, bmask, v))
    fail(Errc::precondition, "minimal_pair_chain: extension is not intrinsic");
  std::vector<Mask> chain{amask};
  if (amask == bmask) return chain;
  check_sweep_size(bmask & ~amask);
  std::set<Mask> dead;
  if (!chain_dfs(a, m, amask, bmask, v, dead, chain))
    fail(Errc::search_exhausted,
         "minimal_pair_chain: no decomposition found (unexpected)");
  return chain;
}

bool for_each_connected_set(const FinStructure& m, Mask allowed, int max_size,
                            const std::function<bool(Mask)>& visit) {
  // adjacency: two vertices sharing any triple of m
  const int n = m.size();
  std::vector<Mask> adj(n, 0);
  for (const auto& t : m.triples())
    for (int i = 0; i < 3; ++i) adj[t.v[i]] |= t.mask & ~bit(t.v[i]);

  std::set<Mask> layer;
  for (int v = 0; v < n; ++v)
    if (allowed & bit(v)) layer.insert(bit(v));
  for (int size = 1; size <= max_size && !layer.empty(); ++size) {
    for (Mask s : layer)
      if (visit(s)) return true;
    std::set<Mask> next;
    for (Mask s : layer) {
      Mask frontier = 0;
      for (int v = 0; v < n; ++v)
        if (s & bit(v)) frontier |= adj[v];
      frontier &= allowed & ~s;
      for (int v = 0; v < n; ++v)
        if (frontier & bit(v)) next.insert(s | bit(v));
    }
    layer = std::move(next);
  }
  return false;
}

namespace {

// Size-minimal witness against strongness of `smask` in m, or 0.
// A size-minimal witness is automatically a minimal pair over smask, and
// witnesses split additively over triple-connected components, so searching
// connected sets by ascending size is exact.
Mask strongness_witness(const Alpha& a, const FinStructure& m, Mask smask,
                        Variant v, int max_new) {
  Rat ds = delta(a, m, smask);
  Mask found = 0;
  for_each_connected_set(m, m.full_mask() & ~smask, max_new, [&](Mask t) {
    Rat dt = delta(a, m, smask | t);
    bool viol = v == Variant::Strict ? dt <= ds : dt < ds;
    if (viol) {
      found = t;
      return true;
    }
    return false;
  });
  return found;
}

}  // namespace

Mask closure_mask(const Alpha& a, const FinStructure& m, Mask amask, Variant v,
                  std::optional<int> bound, int witness_cap) {
  if (amask & ~m.full_mask())
    fail(Errc::precondition, "closure: base outside M");
  if (bound) {
    // union of intrinsic extensions with fewer than n new vertices
    int limit = *bound - 1;
    if (limit < 0) return amask;
    Mask acc = amask;
    Mask rest = m.full_mask() & ~amask;
    if (popcount(rest) <= kIntermediateCap) {
      all_submasks(rest, [&](Mask sub) {
        if (sub != 0 && popcount(sub) <= limit &&
            is_intrinsic(a, m, amask, amask | sub, v))
          acc |= sub;
        return true;
      });
    } else {
      // large ambient: intrinsic extensions decompose into minimal pairs,
      // whose steps are triple-connected, so a connected sweep is enough to
      // seed the union; the union of intrinsic extensions is intrinsic.
      for_each_connected_set(m, rest, limit, [&](Mask t) {
        if (is_intrinsic(a, m, amask, amask | t, v)) acc |= t;
        return false;
      });
    }
    return acc;
  }
  // unbounded: least strong superset via iterated minimal pairs
  Mask s = amask;
  while (true) {
    int room = popcount(m.full_mask() & ~s);
    if (room == 0) break;
    if (witness_cap > 0) room = std::min(room, witness_cap);
    Mask t = strongness_witness(a, m, s, v, room);
    if (!t) break;
    s |= t;
  }
  return s;
}

bool in_class(const Alpha& a, const FinStructure& m, Mask sub, Variant v) {
  FinStructure s = m.substructure(sub);
  return in_class(a, s, v);
}

bool in_class(const Alpha& a, const FinStructure& s, Variant v,
              int witness_cap) {
  // C*+: every nonempty subset has delta > 0;  C+: every subset >= 0.
  // Equivalent to "no witness over the empty base".
  int cap = witness_cap > 0 ? std::min(witness_cap, s.size()) : s.size();
  return strongness_witness(a, s, 0, v, cap) == 0;
}

MuBound mu_bound(const Alpha& a, const FinStructure& m, Mask amask, Mask bmask) {
  if (!is_intrinsic(a, m, amask, bmask, Variant::Strict))
    fail(Errc::precondition, "mu_bound: pair is not a strict intrinsic extension");
  Rat rel = delta_rel(a, m, bmask, amask);
  if (!(rel < Rat(0)))
    fail(Errc::precondition,
         "mu_bound: delta(B/A) = " + rel.str() + " is not negative");
  Rat da = delta(a, m, amask);
  int crossing = 0;  // triples with a node in B\A and a node in A
  Mask diff = bmask & ~amask;
  for (const auto& t : m.triples())
    if ((t.mask & ~bmask) == 0 && (t.mask & diff) && (t.mask & amask)) ++crossing;
  MuBound out;
  out.classic = da / (-rel);
  if (crossing == 0)
    fail(Errc::precondition, "mu_bound: no crossing relations, displayed bound undefined");
  out.paper_displayed = da / (a.value() * Rat(crossing));
  return out;
}

long long mu_eta(const Alpha& a, const FinStructure& m, Mask amask, Mask bmask) {
  Rat classic = mu_bound(a, m, amask, bmask).classic;
  long long eta = classic.ceil() - 1;
  return eta < 0 ? 0 : eta;
}

Rat SequenceSpec::term(int n) const {
  if (!explicit_terms.empty()) {
    if (n < 0 || n >= static_cast<int>(explicit_terms.size()))
      fail(Errc::invalid_argument, "sequence term index out of range");
    return explicit_terms[n];
  }
  return limit + Rat(1, n + c);
}

void SequenceSpec::validate() const {
  if (!(Rat(0) < limit && limit <= Rat(1)))
    fail(Errc::invalid_argument, "sequence limit must lie in (0,1]");
  if (!explicit_terms.empty()) {
    for (size_t i = 0; i < explicit_terms.size(); ++i) {
      if (!(explicit_terms[i] > limit))
        fail(Errc::invalid_argument, "sequence terms must stay above the limit");
      if (i > 0 && !(explicit_terms[i] < explicit_terms[i - 1]))
        fail(Errc::invalid_argument, "sequence must be strictly decreasing");
      if (explicit_terms[i] > Rat(1))
        fail(Errc::invalid_argument, "sequence terms must lie in (0,1]");
    }
    return;
  }
  if (c <= 0) fail(Errc::invalid_argument, "sequence offset c must be positive");
  if (term(0) > Rat(1))
    fail(Errc::invalid_argument,
         "sequence leaves (0,1]: a_0 = " + term(0).str());
}

SequenceSpec SequenceSpec::parse(const std::string& limit_str,
                                 const std::string& rule) {
  SequenceSpec spec;
  spec.limit = Rat::parse(limit_str);
  // accepted rule shapes: "1/(n+C)" or just "C"
  std::string r = rule;
  r.erase(std::remove_if(r.begin(), r.end(),
                         [](unsigned char ch) { return std::isspace(ch); }),
          r.end());
  if (r.rfind("1/(n+", 0) == 0 && r.back() == ')') {
    spec.c = std::stoll(r.substr(5, r.size() - 6));
  } else if (!r.empty() && r.find_first_not_of("0123456789") == std::string::npos) {
    spec.c = std::stoll(r);
  } else {
    fail(Errc::parse, "cannot parse sequence rule '" + rule +
                          "' (expected 1/(n+c))");
  }
  spec.validate();
  return spec;
}

ThresholdResult stabilization_threshold(
    const SequenceSpec& seq, const std::function<bool(const Alpha&)>& property,
    const std::function<bool()>& holds_at_limit, int horizon, int window) {
  seq.validate();
  if (!holds_at_limit())
    fail(Errc::precondition, "stabilization: property fails at the limit");
  ThresholdResult res;
  res.horizon = horizon;
  res.window = window;
  auto at = [&](int n) { return property(Alpha(seq.term(n))); };
  std::map<int, bool> memo;
  auto cached = [&](int n) {
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    bool b = at(n);
    memo[n] = b;
    return b;
  };
  for (int n = 0; n <= horizon; ++n) {
    if (!cached(n)) continue;
    bool ok = true;
    for (int k = 1; k <= window; ++k)
      if (!cached(n + k)) {
        ok = false;
        break;
      }
    if (ok) {
      res.found = true;
      res.n = n;
      return res;
    }
  }
  return res;  // found == false: no threshold within horizon
}

}  // namespace predimlab
