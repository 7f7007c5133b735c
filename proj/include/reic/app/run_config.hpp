#ifndef REIC_APP_RUN_CONFIG_HPP
#define REIC_APP_RUN_CONFIG_HPP

#include "reic/reward.hpp"
#include "reic/synthetic.hpp"
#include "reic/trainer.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace reic::app {

/// Flat key/value configuration covering corpus generation, selection,
/// rewards and training. Every key has a default; unknown keys are rejected.
/// Text form: one `key = value` per line, `#` starts a comment.
class RunConfig {
 public:
  RunConfig();

  static RunConfig from_text(const std::string& text);
  static RunConfig from_file(const std::filesystem::path& path);

  void merge_text(const std::string& text);
  void set(const std::string& key, const std::string& value);
  /// Parses "key=value".
  void assign(const std::string& assignment);
  const std::string& get(const std::string& key) const;
  bool has_key(const std::string& key) const { return values_.count(key) != 0; }

  /// Sorted `key = value` lines; parsing it back yields an equal config.
  std::string to_text() const;

  SyntheticConfig synthetic() const;
  TrainConfig train() const;
  RewardConfig reward() const;

  bool operator==(const RunConfig&) const = default;

  static const std::vector<std::string>& keys();

 private:
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::map<std::string, std::string> values_;
};

SelectorKind parse_selector(const std::string& s);
HeadVariant parse_head(const std::string& s);
std::string to_string(SelectorKind k);
std::string to_string(HeadVariant v);

}  // namespace reic::app

#endif  // REIC_APP_RUN_CONFIG_HPP
