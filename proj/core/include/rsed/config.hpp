#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rsed/baseline.hpp"
#include "rsed/synth.hpp"
#include "rsed/train.hpp"

namespace rsed {

/// Plain `key = value` file; '#' starts a comment. Later keys override earlier ones.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig from_file(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  std::optional<std::string> get(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  uint64_t get_u64(const std::string& key, uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Keys never read through a getter; lets callers reject typos.
  std::vector<std::string> unused_keys() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

/// Overrides `cfg` fields from keys such as `batch_size`, `learning_rate`, `hidden`.
void apply(const KeyValueConfig& kv, TrainConfig& cfg);
/// Keys are prefixed, e.g. `synth.participants`, `synth.cas_probability`.
void apply(const KeyValueConfig& kv, SynthConfig& cfg, const std::string& prefix = "synth.");
void apply(const KeyValueConfig& kv, BaselineConfig& cfg);

/// Inverse of apply(kv, TrainConfig&): every field as key = value lines.
void write_config(std::ostream& os, const TrainConfig& cfg);

std::vector<EventKind> parse_tasks(const std::string& csv);

}  // namespace rsed
