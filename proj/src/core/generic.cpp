#include "generic.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "corpus.hpp"
#include "rng.hpp"

namespace predimlab {

nlohmann::json Chain::to_json() const {
  nlohmann::json j;
  j["alpha"] = alpha.str();
  j["stages"] = nlohmann::json::array();
  for (const auto& s : stages) j["stages"].push_back(s.to_json());
  j["log"] = nlohmann::json::array();
  for (const auto& e : log) {
    nlohmann::json le;
    le["stage"] = e.stage_index;
    le["base_in_stage"] = e.base_in_stage;
    le["extension"] = e.ext.to_json();
    le["base_in_ext"] = e.base_in_ext;
    le["satisfied_at"] = e.satisfied_at;
    j["log"].push_back(le);
  }
  j["backlog"] = nlohmann::json::array();
  for (const auto& r : backlog) {
    nlohmann::json re;
    re["extension"] = r.ext.to_json();
    re["base_in_ext"] = r.base_in_ext;
    re["base_in_stage"] = r.base_in_stage;
    re["enqueued_at_stage"] = r.enqueued_at_stage;
    j["backlog"].push_back(re);
  }
  return j;
}

Chain Chain::from_json(const nlohmann::json& j) {
  Chain c{Alpha::parse(j.at("alpha").get<std::string>()), {}, {}, {}};
  for (const auto& s : j.at("stages")) c.stages.push_back(FinStructure::from_json(s));
  for (const auto& le : j.value("log", nlohmann::json::array())) {
    LogEntry e;
    e.stage_index = le.at("stage").get<int>();
    e.base_in_stage = le.at("base_in_stage").get<std::vector<std::string>>();
    e.ext = FinStructure::from_json(le.at("extension"));
    e.base_in_ext = le.at("base_in_ext").get<std::vector<std::string>>();
    e.satisfied_at = le.at("satisfied_at").get<int>();
    c.log.push_back(std::move(e));
  }
  for (const auto& re : j.value("backlog", nlohmann::json::array())) {
    ExtensionRequest r;
    r.ext = FinStructure::from_json(re.at("extension"));
    r.base_in_ext = re.at("base_in_ext").get<std::vector<std::string>>();
    r.base_in_stage = re.at("base_in_stage").get<std::vector<std::string>>();
    r.enqueued_at_stage = re.at("enqueued_at_stage").get<int>();
    c.backlog.push_back(std::move(r));
  }
  return c;
}

namespace {

// Stages are free joins of small blocks, so violating extensions confine to
// one block; a size cap keeps the fixpoint exact yet fast on large stages.
int stage_witness_cap(const FinStructure& m) { return m.size() > 24 ? 6 : 0; }

// A <= m / A <=* m checked through the closure fixpoint (exact, and cheap
// even when m is much larger than the usual intermediate-sweep cap).
bool strong_in(const Alpha& a, const FinStructure& m, Mask amask,
               Variant v = Variant::NonStrict) {
  return closure_mask(a, m, amask, v, std::nullopt, stage_witness_cap(m)) ==
         amask;
}

FinStructure rename_ext_over_image(const FinStructure& ext,
                                   const std::vector<std::string>& base_in_ext,
                                   const std::vector<std::string>& base_in_stage,
                                   const FinStructure& stage,
                                   const std::string& fresh_prefix,
                                   std::vector<std::string>* new_names_out) {
  std::map<std::string, std::string> rename;
  for (size_t i = 0; i < base_in_ext.size(); ++i)
    rename[base_in_ext[i]] = base_in_stage[i];
  int k = 0;
  auto fresh = [&]() {
    while (true) {
      std::string cand = fresh_prefix + "_" + std::to_string(k++);
      if (!stage.has_vertex(cand) && !ext.has_vertex(cand)) return cand;
    }
  };
  std::vector<std::string> vs;
  for (const auto& n : ext.vertex_names()) {
    auto it = rename.find(n);
    if (it == rename.end()) {
      std::string f = fresh();
      rename[n] = f;
      if (new_names_out) new_names_out->push_back(f);
      vs.push_back(f);
    } else {
      vs.push_back(it->second);
    }
  }
  std::vector<std::array<std::string, 3>> ts;
  for (const auto& t : ext.triples())
    ts.push_back({rename[ext.name(t.v[0])], rename[ext.name(t.v[1])],
                  rename[ext.name(t.v[2])]});
  return FinStructure(std::move(vs), std::move(ts));
}

}  // namespace

FinStructure amalgamate(const Alpha& a, const FinStructure& stage,
                        const ExtensionRequest& req,
                        const std::string& fresh_prefix) {
  if (req.base_in_ext.size() != req.base_in_stage.size())
    fail(Errc::invalid_argument, "amalgamate: base name lists differ in length");
  Mask base_ext_mask = req.ext.mask_of(req.base_in_ext);
  Mask base_stage_mask = stage.mask_of(req.base_in_stage);

  if (popcount(base_ext_mask) != static_cast<int>(req.base_in_ext.size()) ||
      popcount(base_stage_mask) != static_cast<int>(req.base_in_stage.size()))
    fail(Errc::invalid_argument, "amalgamate: repeated base vertex");

  FinStructure base_in_stage = stage.substructure(base_stage_mask);
  FinStructure base_in_ext = req.ext.substructure(base_ext_mask);
  // the base must carry the same diagram on both sides (aligned by the lists)
  {
    std::vector<int> ba, bb;
    for (const auto& n : req.base_in_ext) ba.push_back(base_in_ext.index_of(n));
    for (const auto& n : req.base_in_stage) bb.push_back(base_in_stage.index_of(n));
    if (base_in_ext.triple_count() != base_in_stage.triple_count())
      fail(Errc::precondition, "amalgamate: base diagrams disagree");
    for (size_t i = 0; i < ba.size(); ++i)
      for (size_t j = i + 1; j < ba.size(); ++j)
        for (size_t k = j + 1; k < ba.size(); ++k)
          if (base_in_ext.has_triple(ba[i], ba[j], ba[k]) !=
              base_in_stage.has_triple(bb[i], bb[j], bb[k]))
            fail(Errc::precondition, "amalgamate: base diagrams disagree");
  }
  // Zero-delta gadgets are legitimate requests (the class has no AC), so
  // strongness of the base inside the extension is the nonstrict one.
  if (!is_strong(a, req.ext, base_ext_mask, req.ext.full_mask(),
                 Variant::NonStrict))
    fail(Errc::precondition, "amalgamate: base is not strong in the extension");
  if (!in_class(a, req.ext, Variant::Strict))
    fail(Errc::precondition, "amalgamate: extension leaves C*+");
  // stale-request re-validation
  if (!strong_in(a, stage, base_stage_mask))
    fail(Errc::precondition, "amalgamate: request base is no longer strong in the stage");

  std::vector<std::string> fresh_names;
  FinStructure renamed = rename_ext_over_image(
      req.ext, req.base_in_ext, req.base_in_stage, stage, fresh_prefix,
      &fresh_names);
  FinStructure next = free_join(stage, base_in_stage, renamed);

  if (!in_class(a, next, Variant::Strict, stage_witness_cap(next)))
    fail(Errc::precondition, "amalgamate: new stage left C*+ (unexpected)");
  if (!is_strong(a, next, next.mask_of(stage.vertex_names()), next.full_mask(),
                 Variant::NonStrict))
    fail(Errc::precondition, "amalgamate: old stage not strong in new stage");
  if (!strong_in(a, next, next.mask_of(renamed.vertex_names())))
    fail(Errc::precondition, "amalgamate: fresh copy not strong in new stage");
  return next;
}

namespace {

struct TypeEntry {
  FinStructure ext;
  std::vector<std::string> base_in_ext;
};

std::vector<TypeEntry> extension_catalog(const Alpha& a, int max_ext_size) {
  std::vector<TypeEntry> out;
  for (const auto& b : all_structures_up_to_iso(max_ext_size)) {
    if (b.empty() || !in_class(a, b, Variant::Strict)) continue;
    Mask full = b.full_mask();
    for (Mask base = 0; base < full; ++base) {
      if (base & ~full) continue;
      if (!is_strong(a, b, base, full, Variant::NonStrict)) continue;
      out.push_back(TypeEntry{b, b.substructure(base).vertex_names()});
    }
  }
  // small extensions first, then fewer base vertices
  std::stable_sort(out.begin(), out.end(), [](const TypeEntry& x, const TypeEntry& y) {
    if (x.ext.size() != y.ext.size()) return x.ext.size() < y.ext.size();
    return x.base_in_ext.size() < y.base_in_ext.size();
  });
  return out;
}

// does a strong copy of ext over the given base image already exist?
bool realized_strongly(const Alpha& a, const FinStructure& stage,
                       const TypeEntry& type,
                       const std::vector<std::string>& base_image) {
  auto copies = enumerate_copies(stage, type.ext, type.base_in_ext, base_image);
  for (const auto& e : copies)
    if (closure_mask(a, stage, e.image_mask(), Variant::NonStrict, std::nullopt,
                     stage_witness_cap(stage)) == e.image_mask())
      return true;
  return false;
}

}  // namespace

Chain build_generic(const Alpha& a, const BuildBudget& budget,
                    std::uint64_t seed) {
  Chain chain{a, {FinStructure({}, {})}, {}, {}};
  Rng rng(seed);
  auto types = extension_catalog(a, budget.max_ext_size);
  std::deque<ExtensionRequest> queue;
  std::set<std::string> pending;  // keys currently queued or backlogged

  // Satisfied requests become eligible again in later rounds: copies of
  // zero-delta extensions are meant to accumulate (the class has no AC),
  // so the dovetail keeps revisiting every (type, base copy) pair.
  int steps_left = budget.steps;
  for (int round = 1; steps_left > 0; ++round) {
    const FinStructure stage = chain.last();
    int discovered = 0;
    for (size_t ti = 0; ti < types.size(); ++ti) {
      const auto& type = types[ti];
      if (type.ext.size() > std::min(budget.max_ext_size, round + 1)) continue;
      FinStructure base_struct = type.ext.substructure(
          type.ext.mask_of(type.base_in_ext));
      std::vector<std::vector<std::string>> base_images;
      if (type.base_in_ext.empty()) {
        base_images.push_back({});
      } else {
        auto maps = enumerate_copy_maps(stage, base_struct,
                                        std::vector<int>(base_struct.size(), -1));
        for (const auto& mp : maps) {
          std::vector<std::string> img;
          for (const auto& bn : type.base_in_ext)
            img.push_back(stage.name(mp[base_struct.index_of(bn)]));
          Mask m = stage.mask_of(img);
          if (closure_mask(a, stage, m, Variant::NonStrict, std::nullopt,
                           stage_witness_cap(stage)) != m)
            continue;
          base_images.push_back(img);
          if (static_cast<int>(base_images.size()) >= round) break;
        }
      }
      for (auto& img : base_images) {
        std::string key = std::to_string(ti) + "@";
        for (const auto& n : img) key += n + ",";
        if (!pending.insert(key).second) continue;
        ExtensionRequest req{type.ext, type.base_in_ext, img,
                             static_cast<int>(chain.stages.size()) - 1};
        queue.push_back(std::move(req));
        ++discovered;
      }
    }
    // seeded tie-breaking within the freshly discovered batch
    if (discovered > 1) {
      std::vector<ExtensionRequest> tail(queue.end() - discovered, queue.end());
      rng.shuffle(tail);
      std::copy(tail.begin(), tail.end(), queue.end() - discovered);
    }
    int done = 0;
    while (!queue.empty() && steps_left > 0) {
      ExtensionRequest req = queue.front();
      queue.pop_front();
      std::string key;
      {
        auto it = std::find_if(types.begin(), types.end(), [&](const TypeEntry& t) {
          return t.ext == req.ext && t.base_in_ext == req.base_in_ext;
        });
        key = std::to_string(it - types.begin()) + "@";
        for (const auto& n : req.base_in_stage) key += n + ",";
      }
      int new_vertices = req.ext.size() - static_cast<int>(req.base_in_ext.size());
      if (chain.last().size() + new_vertices > budget.max_vertices) {
        chain.backlog.push_back(req);  // stays pending: it cannot run
        continue;
      }
      std::string prefix = "g" + std::to_string(chain.stages.size());
      FinStructure next = amalgamate(a, chain.last(), req, prefix);
      LogEntry e{static_cast<int>(chain.stages.size()) - 1, req.base_in_stage,
                 req.ext, req.base_in_ext,
                 static_cast<int>(chain.stages.size())};
      chain.stages.push_back(std::move(next));
      chain.log.push_back(std::move(e));
      pending.erase(key);
      --steps_left;
      ++done;
    }
    if (done == 0 && discovered == 0) break;
    if (done == 0 && queue.empty()) break;  // everything hit the vertex cap
  }
  for (auto& r : queue) chain.backlog.push_back(r);
  return chain;
}

GenericityReport check_genericity(const Alpha& a, const FinStructure& stage,
                                  const std::vector<CatalogEntry>& catalog) {
  GenericityReport rep;
  for (size_t i = 0; i < catalog.size(); ++i) {
    const auto& entry = catalog[i];
    FinStructure base_struct =
        entry.ext.substructure(entry.ext.mask_of(entry.base_in_ext));
    std::vector<std::vector<std::string>> images;
    if (entry.base_in_ext.empty()) {
      images.push_back({});
    } else {
      auto maps = enumerate_copy_maps(stage, base_struct,
                                      std::vector<int>(base_struct.size(), -1));
      for (const auto& mp : maps) {
        std::vector<std::string> img;
        for (const auto& bn : entry.base_in_ext)
          img.push_back(stage.name(mp[base_struct.index_of(bn)]));
        Mask m = stage.mask_of(img);
        if (closure_mask(a, stage, m, Variant::NonStrict, std::nullopt,
                         stage_witness_cap(stage)) != m)
          continue;
        images.push_back(img);
      }
    }
    for (auto& img : images) {
      bool sat = realized_strongly(
          a, stage, TypeEntry{entry.ext, entry.base_in_ext}, img);
      rep.rows.push_back(GenericityRow{static_cast<int>(i), img, sat});
    }
  }
  return rep;
}

bool check_semigeneric(const Alpha& a, const FinStructure& m,
                       const FinStructure& ext,
                       const std::vector<std::string>& base_in_ext,
                       const std::vector<std::string>& base_in_m, int n) {
  if (!is_strong(a, ext, ext.mask_of(base_in_ext), ext.full_mask(),
                 Variant::Strict))
    fail(Errc::precondition, "check_semigeneric: A is not strong in B");
  Mask ga = m.mask_of(base_in_m);
  Mask cl_ga = closure_mask(a, m, ga, Variant::Strict, n);
  auto copies = enumerate_copies(m, ext, base_in_ext, base_in_m);
  for (const auto& e : copies) {
    Mask gb = e.image_mask();
    Mask cl_gb = closure_mask(a, m, gb, Variant::Strict, n);
    if (cl_gb != (cl_ga | gb)) continue;
    if ((cl_ga & gb) != ga) continue;
    bool free = true;
    for (const auto& t : m.triples()) {
      if (t.mask & ~cl_gb) continue;
      if ((t.mask & (cl_ga & ~ga)) && (t.mask & (gb & ~ga))) {
        free = false;
        break;
      }
    }
    if (free) return true;
  }
  return false;
}

OldNew classify_old_new(const Alpha& a, const FinStructure& m, Mask amask,
                        Mask bmask, Mask cmask, Variant v) {
  Mask ab = amask | bmask;
  if (ab & ~cmask) fail(Errc::precondition, "classify_old_new: AB not inside C");
  if (!is_intrinsic(a, m, ab, cmask, v))
    fail(Errc::precondition, "classify_old_new: C is not intrinsic over AB");
  if (!is_intrinsic(a, m, amask, cmask, v)) return OldNew::New;
  Mask cnew = cmask & ~ab;
  Mask bnew = bmask & ~amask;
  for (const auto& t : m.triples()) {
    if (t.mask & ~cmask) continue;
    if ((t.mask & cnew) && (t.mask & bnew)) return OldNew::New;
  }
  return OldNew::Old;
}

namespace {

void combos(int pool, int want, int start, std::vector<int>& pick,
            const std::function<bool()>& emit, long long& budget) {
  if (budget <= 0) return;
  if (want == 0) {
    --budget;
    if (emit()) budget = -1;  // signal: found, stop everything
    return;
  }
  for (int i = start; i + want <= pool && budget > 0; ++i) {
    pick.push_back(i);
    combos(pool, want - 1, i + 1, pick, emit, budget);
    pick.pop_back();
  }
}

}  // namespace

FinStructure zero_minimal_pair(const Alpha& a, const FinStructure& base,
                               const ZeroGadgetOptions& opts) {
  if (base.size() < 2)
    fail(Errc::precondition, "zero_minimal_pair: base needs at least 2 vertices");
  if (!in_class(a, base, Variant::Strict))
    fail(Errc::precondition, "zero_minimal_pair: base leaves C*+");
  const long long p = a.p(), q = a.q();
  long long budget = opts.search_cap;
  const int k_start = std::max(1, opts.multiplier);
  const int k_stop = std::max(k_start, opts.max_multiplier);
  for (int k = k_start; k <= k_stop && budget > 0; ++k) {
    long long new_n = k * p, new_t = k * q;
    if (base.size() + new_n > kMaxVertices) break;
    if (std::find(opts.exclude_new_sizes.begin(), opts.exclude_new_sizes.end(),
                  static_cast<int>(new_n)) != opts.exclude_new_sizes.end())
      continue;
    std::vector<std::string> names = base.vertex_names();
    std::vector<std::string> fresh;
    for (long long i = 0; i < new_n; ++i) {
      std::string f;
      int suffix = static_cast<int>(i);
      do {
        f = opts.fresh_prefix + std::to_string(suffix);
        suffix += static_cast<int>(new_n);
      } while (base.has_vertex(f));
      fresh.push_back(f);
      names.push_back(f);
    }
    FinStructure shell(names, {});
    Mask base_mask = shell.mask_of(base.vertex_names());
    Mask fresh_mask = shell.full_mask() & ~base_mask;
    // candidate triples: touch at least one fresh vertex (and optionally
    // cover the whole base collectively -- enforced after selection).
    // With two or more fresh vertices a triple carrying exactly one of them
    // would hand that vertex a zero-delta proper intermediate, so such
    // triples can never appear in a minimal pair and are pruned up front.
    std::vector<std::array<int, 3>> cands;
    for (int x = 0; x < shell.size(); ++x)
      for (int y = x + 1; y < shell.size(); ++y)
        for (int z = y + 1; z < shell.size(); ++z) {
          Mask tm = bit(x) | bit(y) | bit(z);
          int fresh_count = popcount(tm & fresh_mask);
          if (fresh_count == 0) continue;
          if (new_n >= 2 && fresh_count == 1 && a.value() == Rat(1, 1))
            continue;
          cands.push_back({x, y, z});
        }
    if (static_cast<long long>(cands.size()) < new_t) continue;
    std::vector<std::array<std::string, 3>> base_triples;
    for (const auto& t : base.triples())
      base_triples.push_back(
          {base.name(t.v[0]), base.name(t.v[1]), base.name(t.v[2])});
    FinStructure found;
    bool ok = false;
    std::vector<int> pick;
    combos(
        static_cast<int>(cands.size()), static_cast<int>(new_t), 0, pick,
        [&]() {
          auto ts = base_triples;
          Mask cover = 0;
          for (int i : pick) {
            const auto& c = cands[i];
            cover |= bit(c[0]) | bit(c[1]) | bit(c[2]);
            ts.push_back({shell.name(c[0]), shell.name(c[1]), shell.name(c[2])});
          }
          if (opts.cover_base && (base_mask & ~cover)) return false;
          FinStructure cand(names, ts);
          Mask bm = cand.mask_of(base.vertex_names());
          if (!is_minimal_pair(a, cand, bm, cand.full_mask(), Variant::Strict))
            return false;
          if (!in_class(a, cand, Variant::Strict)) return false;
          if (opts.accept && !opts.accept(cand)) return false;
          for (const auto& ex : opts.exclude_iso_over_base) {
            if (ex.size() != cand.size()) continue;
            std::vector<int> ba, bb;
            for (const auto& nme : base.vertex_names()) {
              if (ex.index_of(nme) < 0) goto next_exclusion;
              ba.push_back(cand.index_of(nme));
              bb.push_back(ex.index_of(nme));
            }
            if (isomorphic_over(cand, ex, ba, bb)) return false;
          next_exclusion:;
          }
          found = cand;
          ok = true;
          return true;
        },
        budget);
    if (ok) return found;
  }
  fail(Errc::search_exhausted, "zero_minimal_pair: no gadget within search bound");
}

}  // namespace predimlab
