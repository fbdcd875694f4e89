#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "relnet/common.hpp"
#include "relnet/diurnal.hpp"
#include "relnet/extract.hpp"
#include "relnet/synth.hpp"

namespace relnet {

/// Flat, namespaced key-value settings ("extract.min_phrase_count = 10").
/// Every key has a default; unknown keys are rejected.
class RunConfig {
 public:
  RunConfig();

  static RunConfig from_file(const std::string& path);
  /// "key = value" lines; '#' starts a comment line.
  void load(std::istream& in, const std::string& origin = "config");
  void set(const std::string& key, const std::string& value);
  /// "key=value"
  void assign(const std::string& assignment);

  const std::string& get(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::int64_t get_int64(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  /// Comma-separated, empty items dropped.
  std::vector<std::string> get_list(const std::string& key) const;

  std::uint64_t seed() const { return get_u64("seed"); }
  int workers() const { return get_int("workers"); }
  std::string out_dir() const { return get("out"); }

  /// Hash of every setting except the output directory and the worker count.
  std::string hash() const;
  /// "# relnet <version> config=<hash> seed=<seed>"
  std::string header() const;
  /// Canonical "key = value" listing, sorted by key.
  std::string dump() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// A stage needs an artifact that an earlier stage produces.
class MissingArtifactError : public Error {
 public:
  MissingArtifactError(const std::string& path, const std::string& stage)
      : Error("missing " + path + ": run the '" + stage + "' stage first"), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Stage names in pipeline order.
const std::vector<std::string>& stage_names();

struct StageResult {
  std::vector<std::string> outputs;  // paths written
  std::vector<std::string> summary;  // short human-readable lines
};

/// Throws ConfigError for an unknown stage.
StageResult run_stage(const std::string& stage, const RunConfig& config);

SynthConfig synth_config_from(const RunConfig& config);

// Analysis inputs shared by the stages and the acceptance checks.

/// Directed mentions between the two users of each dyad (both directions),
/// label-leaking tweets removed.
std::map<Category, std::vector<std::string>> directed_texts_by_category(const TweetIndex& index,
                                                                        const std::vector<LabeledDyad>& dyads);

/// One distribution per dyad direction with enough activity, from directed
/// and public mentions of the sender toward the partner.
std::map<std::string, std::vector<HourVector>> diurnal_inputs(const TweetIndex& index,
                                                              const std::vector<LabeledDyad>& dyads,
                                                              std::size_t min_activity);

}  // namespace relnet
