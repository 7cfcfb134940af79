#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "rwave/solver.hpp"

namespace rwave::io {

inline constexpr const char* kCsvSchema = "rwave-csv-1";
inline constexpr const char* kManifestSchema = "rwave-manifest-1";

// Numeric formatting used in every payload file: the shortest decimal that
// parses back to the same double, so reruns compare byte for byte.
std::string format_double(double v);

// Payload table: schema comment line, header line, then rows. No timestamps
// or environment data ever land here.
class Csv {
 public:
  explicit Csv(std::vector<std::string> columns);
  void add_row(std::vector<std::string> cells);
  void add_numeric_row(const std::vector<double>& values);
  std::string str() const;
  void write(const std::string& path) const;  // atomic: tmp file + rename

 private:
  std::vector<std::string> cols_;
  std::vector<std::vector<std::string>> rows_;
};

std::uint64_t fnv1a64(const std::string& s);

// Sorted-key, whitespace-free dump; the hash is over this canonical form.
std::string canonical_json(const nlohmann::json& j);
std::string config_hash8(const nlohmann::json& j);  // first 8 hex digits

void write_text_atomic(const std::string& path, const std::string& content);

// Binary trajectory container with exact bit-level roundtrip (host byte
// order; intended for same-machine reload, not interchange).
void save_trajectory(const std::string& path, const Trajectory& traj);
Trajectory load_trajectory(const std::string& path);

// Run metadata written last, after every payload file is in place, so a
// manifest on disk certifies a complete run. Mutable facts (timestamps,
// durations, thread counts) live only here.
struct RunManifest {
  std::string experiment;
  std::string config_hash;
  nlohmann::json config_echo;
  std::string started_utc, finished_utc;
  double duration_seconds = 0.0;
  int threads = 1;
  std::string exec;  // "serial" or "openmp"
  std::string dealias;
  int skipped_cubes = 0;
  std::vector<std::string> outputs;
  std::vector<int> nan_members;
  nlohmann::json summary;

  nlohmann::json to_json() const;
};

void write_manifest(const std::string& path, const RunManifest& m);

std::string utc_now();

}  // namespace rwave::io
