#ifndef REIC_APP_COMMANDS_HPP
#define REIC_APP_COMMANDS_HPP

#include "reic/app/run_config.hpp"
#include "reic/trainer.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace reic::app {

namespace fs = std::filesystem;

/// Entry point of the `reic` binary. args excludes the program name.
/// Returns 0 on success, 2 on usage errors, 1 on data errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Writes train.json, eval.json, embeddings.bin and resolved-config.txt.
void gen_corpus(const RunConfig& cfg, const fs::path& out_dir);

/// Trains on corpus_dir/train.json; writes checkpoint.bin, history.csv,
/// epochs.csv (wall-clock log) and resolved-config.txt.
TrainHistory train_to_dir(const RunConfig& cfg, const fs::path& corpus_dir, const fs::path& out_dir);

/// Evaluates a train_to_dir output on corpus_dir/<split>.json; writes
/// metrics.csv and selection-stats.csv when out_dir is non-empty, plus
/// precision-at-k.csv when extra cutoffs are requested.
EvalMetrics eval_from_dir(const fs::path& model_dir, const fs::path& corpus_dir, const fs::path& out_dir,
                          const std::string& split = "eval", const std::vector<std::size_t>& precision_at = {});

struct SweepSpec {
  std::string key;  // config key; `lambda` is accepted for lambda_positive
  std::vector<std::string> values;
};
SweepSpec parse_sweep(const std::string& text);

/// One train + eval per sweep value under out_dir/<key>-<value>/, plus the
/// combined out_dir/ablation.csv. Returns the number of rows written.
std::size_t ablate(const RunConfig& base, const fs::path& corpus_dir, const SweepSpec& sweep, const fs::path& out_dir);

/// Emits SVG plots for every recognised CSV (history, ablation, selection
/// stats). Returns the files written.
std::vector<fs::path> report(const std::vector<fs::path>& inputs, const fs::path& out_dir);

std::string history_csv(const TrainHistory& history);
std::string metrics_csv(const EvalMetrics& m);

}  // namespace reic::app

#endif  // REIC_APP_COMMANDS_HPP
