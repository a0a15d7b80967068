#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace predimlab {

// Machine-checkable claim record.  `work` is a deterministic check counter
// (wall-clock timing lives only in the report, never in certificates, so
// identical manifests produce byte-identical certificate files).
struct Certificate {
  std::string claim;
  nlohmann::json inputs;
  nlohmann::json witnesses;
  std::string verdict;  // "pass" | "fail" | "finding"
  long long work = 0;

  nlohmann::json to_json() const;
};

struct SuiteReport {
  std::string suite;
  bool pass = false;
  long long checked = 0;
  long long failed = 0;
  std::vector<Certificate> certificates;
  std::vector<std::string> findings;
  double wall_ms = 0;

  nlohmann::json certificates_json() const;  // canonical, timing-free
  nlohmann::json to_json() const;            // report with timing
};

struct Manifest {
  std::string suite;
  std::string alpha = "1";
  std::uint64_t seed = 1;
  int random_count = 0;   // 0: per-suite default
  int size_cap = 0;       // 0: per-suite default
  int steps = 0;          // budget knobs where applicable
  std::string out_dir;    // optional certificate/report destination

  static Manifest from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

std::vector<std::string> suite_names();

SuiteReport run_suite(const Manifest& m);

// Re-evaluates a certificate bundle: re-runs the embedded manifest and
// compares the canonical certificate bytes.
bool verify_certificates(const nlohmann::json& bundle, std::string* why = nullptr);

// Bundle = manifest + certificates + digest, the unit written to disk.
nlohmann::json certificate_bundle(const Manifest& m, const SuiteReport& r);

int worker_threads();  // PREDIMLAB_THREADS override, else hardware, capped

}  // namespace predimlab
