#include "reic/app/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace reic::app {

namespace {

const std::vector<std::pair<std::string, std::string>>& defaults() {
  static const std::vector<std::pair<std::string, std::string>> d = {
      // corpus generation
      {"n_bags", "200"},
      {"n_eval_bags", "100"},
      {"n_relations", "4"},
      {"sentences_per_doc", "60"},
      {"paths_per_bag", "3"},
      {"dim", "768"},
      {"noise_sigma", "0.5"},
      {"signature_scale", "10"},
      {"na_bag_fraction", "0.5"},
      {"positive_path_fraction", "0.5"},
      {"evidence_offset_min", "20"},
      {"tokens_per_sentence", "25"},
      {"n_distractor_entities", "40"},
      {"seed", "1"},
      // training and selection
      {"lr_policy", "3e-3"},
      {"lr_re", "3e-5"},
      {"epochs", "30"},
      {"batch_size", "4"},
      {"grad_clip", "5"},
      {"weight_decay", "0.01"},
      {"optimizer", "adamw"},
      {"master_seed", "0"},
      {"T", "15"},
      {"token_cap", "512"},
      {"eval_mode", "argmax"},
      {"selector", "reic"},
      {"head", "end2end"},
      {"policy_hidden", "512"},
      {"head_hidden", "512"},
      {"threshold", "0"},
      {"snippet_window", "1000"},
      {"filter_cap", "16"},
      // rewards
      {"lambda_positive", "10"},
      {"lambda_na", "1"},
      {"clip_negative", "auto"},
  };
  return d;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& [key, value] : defaults()) out.push_back(key);
    return out;
  }();
  return k;
}

RunConfig::RunConfig() {
  for (const auto& [key, value] : defaults()) values_[key] = value;
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig cfg;
  cfg.merge_text(text);
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

void RunConfig::merge_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected `key = value`");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key `" + key + "`");
  if (value.empty()) throw ConfigError("empty value for config key `" + key + "`");
  it->second = value;
}

void RunConfig::assign(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got `" + assignment + "`");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key `" + key + "`");
  return it->second;
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  for (const auto& [key, value] : values_) out << key << " = " << value << '\n';
  return out.str();
}

double RunConfig::get_double(const std::string& key) const {
  const auto& s = get(key);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw ConfigError("config key `" + key + "` expects a number, got `" + s + "`");
  return v;
}

long long RunConfig::get_int(const std::string& key) const {
  const auto& s = get(key);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw ConfigError("config key `" + key + "` expects an integer, got `" + s + "`");
  return v;
}

SelectorKind parse_selector(const std::string& s) {
  if (s == "reic") return SelectorKind::Reic;
  if (s == "onestep") return SelectorKind::OneStep;
  if (s == "snippet") return SelectorKind::Snippet;
  if (s == "bridge") return SelectorKind::Bridge;
  throw ConfigError("unknown selector `" + s + "` (reic|snippet|bridge|onestep)");
}

HeadVariant parse_head(const std::string& s) {
  if (s == "end2end") return HeadVariant::EndToEnd;
  if (s == "threshold") return HeadVariant::Threshold;
  throw ConfigError("unknown head `" + s + "` (end2end|threshold)");
}

std::string to_string(SelectorKind k) {
  switch (k) {
    case SelectorKind::Reic: return "reic";
    case SelectorKind::OneStep: return "onestep";
    case SelectorKind::Snippet: return "snippet";
    case SelectorKind::Bridge: return "bridge";
  }
  return "?";
}

std::string to_string(HeadVariant v) { return v == HeadVariant::EndToEnd ? "end2end" : "threshold"; }

SyntheticConfig RunConfig::synthetic() const {
  SyntheticConfig c;
  c.n_bags = static_cast<int>(get_int("n_bags"));
  c.n_eval_bags = static_cast<int>(get_int("n_eval_bags"));
  c.n_relations = static_cast<int>(get_int("n_relations"));
  c.sentences_per_doc = static_cast<int>(get_int("sentences_per_doc"));
  c.paths_per_bag = static_cast<int>(get_int("paths_per_bag"));
  c.dim = static_cast<int>(get_int("dim"));
  c.noise_sigma = get_double("noise_sigma");
  c.signature_scale = get_double("signature_scale");
  c.na_bag_fraction = get_double("na_bag_fraction");
  c.positive_path_fraction = get_double("positive_path_fraction");
  c.evidence_offset_min = static_cast<int>(get_int("evidence_offset_min"));
  c.tokens_per_sentence = static_cast<int>(get_int("tokens_per_sentence"));
  c.n_distractor_entities = static_cast<int>(get_int("n_distractor_entities"));
  c.seed = static_cast<std::uint64_t>(get_int("seed"));
  c.validate();
  return c;
}

TrainConfig RunConfig::train() const {
  TrainConfig c;
  c.lr_policy = get_double("lr_policy");
  c.lr_re = get_double("lr_re");
  c.epochs = static_cast<int>(get_int("epochs"));
  c.batch_size = static_cast<int>(get_int("batch_size"));
  c.grad_clip = get_double("grad_clip");
  c.weight_decay = get_double("weight_decay");
  const auto& opt = get("optimizer");
  if (opt == "adamw") c.optimizer = nn::OptimizerKind::AdamW;
  else if (opt == "sgd") c.optimizer = nn::OptimizerKind::Sgd;
  else throw ConfigError("unknown optimizer `" + opt + "` (adamw|sgd)");
  c.master_seed = static_cast<std::uint64_t>(get_int("master_seed"));
  c.T = static_cast<int>(get_int("T"));
  c.token_cap = static_cast<int>(get_int("token_cap"));
  const auto& mode = get("eval_mode");
  if (mode == "argmax") c.eval_mode = DecodeMode::Argmax;
  else if (mode == "sample") c.eval_mode = DecodeMode::Sample;
  else throw ConfigError("unknown eval_mode `" + mode + "` (sample|argmax)");
  c.selector = parse_selector(get("selector"));
  c.head = parse_head(get("head"));
  c.policy_hidden = static_cast<int>(get_int("policy_hidden"));
  c.head_hidden = static_cast<int>(get_int("head_hidden"));
  c.threshold = get_double("threshold");
  c.snippet_window = static_cast<int>(get_int("snippet_window"));
  c.filter_cap = static_cast<int>(get_int("filter_cap"));
  c.validate();
  return c;
}

RewardConfig RunConfig::reward() const {
  RewardConfig c;
  c.lambda_positive = get_double("lambda_positive");
  c.lambda_na = get_double("lambda_na");
  c.variant = parse_head(get("head"));
  const auto& clip = get("clip_negative");
  if (clip == "true") c.clip_negative = true;
  else if (clip == "false") c.clip_negative = false;
  else if (clip != "auto") throw ConfigError("clip_negative expects auto|true|false");
  c.validate();
  return c;
}

}  // namespace reic::app
