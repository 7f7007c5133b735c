#include "reic/app/commands.hpp"

#include "reic/app/svg.hpp"
#include "reic/binary_io.hpp"
#include "reic/checkpoint.hpp"
#include "reic/synthetic.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace reic::app {

namespace {

constexpr const char* kHistoryHeader = "step,reward,reward_ema,re_loss,epoch";
constexpr const char* kMetricsHeader =
    "auc,f1,p_at_50,p_at_100,evidence_recall,mean_bridge_mentions_pos,mean_bridge_mentions_na";
constexpr const char* kSelectionHeader =
    "bag,path,bag_type,path_type,head_selected,tail_selected,bridge_mentions,evidence_recall";
constexpr const char* kAblationHeader =
    "sweep_key,sweep_value,selector,head,auc,f1,p_at_50,p_at_100,evidence_recall,mean_bridge_mentions_pos,"
    "mean_bridge_mentions_na,final_reward_ema";

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_file(path);
  return {bytes.begin(), bytes.end()};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (header[k] == name) return k;
    throw DataError("CSV has no column `" + name + "`");
  }
  std::vector<double> numbers(const std::string& name) const {
    const auto c = column(name);
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(std::strtod(r.at(c).c_str(), nullptr));
    return out;
  }
};

Table read_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty CSV");
  t.header = split(line, ',');
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split(line, ',');
    if (row.size() != t.header.size()) throw DataError(path.string() + ": ragged CSV row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string joined(const std::vector<Index>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ' ';
    out += std::to_string(v[k]);
  }
  return out;
}

std::string selection_csv(const EvalResult& res, const Corpus& corpus) {
  std::ostringstream out;
  out << kSelectionHeader << '\n';
  for (std::size_t k = 0; k < res.selections.size(); ++k) {
    const auto& sel = res.selections[k];
    const Bag& bag = corpus.bags[sel.bag];
    std::string path_type = "na";
    if (bag.positive())
      path_type = bag.path_labels ? ((*bag.path_labels)[sel.path] ? "positive" : "na") : "unlabeled";
    out << sel.bag << ',' << sel.path << ',' << (bag.positive() ? "positive" : "na") << ',' << path_type << ','
        << joined(sel.head_sentences) << ',' << joined(sel.tail_sentences) << ','
        << count_bridge_mentions(sel, corpus) << ',' << num(res.path_recall[k]) << '\n';
  }
  return out.str();
}

struct LoadedModel {
  RunConfig cfg;
  Models<float> models;
};

LoadedModel load_model(const fs::path& model_dir, const EmbeddingStore& store, const Corpus& corpus) {
  const Checkpoint ckpt = read_checkpoint(model_dir / "checkpoint.bin");
  LoadedModel lm{RunConfig::from_text(ckpt.config), {}};
  lm.models = init_models<float>(lm.cfg.train(), store.dim(), corpus.num_relations());
  const auto params = lm.models.parameters();
  restore_parameters<float>(ckpt, params);
  return lm;
}

std::string label_for(const fs::path& p) {
  const auto parent = p.parent_path().filename().string();
  return parent.empty() ? p.stem().string() : parent + "-" + p.stem().string();
}

bool is_number(const std::string& s) {
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return !s.empty() && end == s.c_str() + s.size();
}

}  // namespace

std::string history_csv(const TrainHistory& history) {
  std::ostringstream out;
  out << kHistoryHeader << '\n';
  for (const auto& s : history.steps)
    out << s.step << ',' << num(s.reward) << ',' << num(s.reward_ema) << ',' << num(s.re_loss) << ',' << s.epoch
        << '\n';
  return out.str();
}

std::string metrics_csv(const EvalMetrics& m) {
  std::ostringstream out;
  out << kMetricsHeader << '\n'
      << num(m.auc) << ',' << num(m.f1) << ',' << num(m.p_at_50) << ',' << num(m.p_at_100) << ','
      << num(m.evidence_recall) << ',' << num(m.mean_bridge_mentions_pos) << ',' << num(m.mean_bridge_mentions_na)
      << '\n';
  return out.str();
}

void gen_corpus(const RunConfig& cfg, const fs::path& out_dir) {
  const auto data = generate_synthetic(cfg.synthetic());
  fs::create_directories(out_dir);
  write_corpus(data.train, out_dir / "train.json");
  write_corpus(data.eval, out_dir / "eval.json");
  write_embedding_store(data.store, out_dir / "embeddings.bin");
  write_text(out_dir / "resolved-config.txt", cfg.to_text());
}

TrainHistory train_to_dir(const RunConfig& cfg, const fs::path& corpus_dir, const fs::path& out_dir) {
  const TrainConfig tcfg = cfg.train();
  const RewardConfig rcfg = cfg.reward();
  const Corpus corpus = load_corpus(corpus_dir / "train.json");
  const EmbeddingStore store = load_embedding_store(corpus_dir / "embeddings.bin");

  auto result = train<float>(corpus, store, tcfg, rcfg);
  fs::create_directories(out_dir);
  const auto params = result.models.parameters();
  write_checkpoint(make_checkpoint<float>(params, cfg.to_text()), out_dir / "checkpoint.bin");
  write_text(out_dir / "history.csv", history_csv(result.history));
  std::ostringstream epochs;
  epochs << "epoch,mean_reward,mean_re_loss,seconds\n";
  for (const auto& e : result.history.epochs)
    epochs << e.epoch << ',' << num(e.mean_reward) << ',' << num(e.mean_re_loss) << ',' << num(e.seconds) << '\n';
  write_text(out_dir / "epochs.csv", epochs.str());
  write_text(out_dir / "resolved-config.txt", cfg.to_text());
  return result.history;
}

EvalMetrics eval_from_dir(const fs::path& model_dir, const fs::path& corpus_dir, const fs::path& out_dir,
                          const std::string& split_name, const std::vector<std::size_t>& precision_at) {
  if (split_name != "eval" && split_name != "train") throw ConfigError("split must be eval or train");
  const Corpus corpus = load_corpus(corpus_dir / (split_name + ".json"));
  const EmbeddingStore store = load_embedding_store(corpus_dir / "embeddings.bin");
  const auto lm = load_model(model_dir, store, corpus);
  const auto res = evaluate<float>(lm.models, corpus, store, lm.cfg.train());
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_text(out_dir / "metrics.csv", metrics_csv(res.metrics));
    write_text(out_dir / "selection-stats.csv", selection_csv(res, corpus));
    if (!precision_at.empty()) {
      std::ostringstream pk;
      pk << "k,precision\n";
      for (std::size_t k : precision_at) pk << k << ',' << num(precision_at_k(res.predictions, k)) << '\n';
      write_text(out_dir / "precision-at-k.csv", pk.str());
    }
  }
  return res.metrics;
}

SweepSpec parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
    throw ConfigError("sweep expects key=v1,v2,..., got `" + text + "`");
  SweepSpec spec{text.substr(0, eq), split(text.substr(eq + 1), ',')};
  if (spec.key == "lambda") spec.key = "lambda_positive";
  if (!RunConfig().has_key(spec.key)) throw ConfigError("unknown sweep key `" + spec.key + "`");
  for (const auto& v : spec.values)
    if (v.empty()) throw ConfigError("empty value in sweep `" + text + "`");
  return spec;
}

std::size_t ablate(const RunConfig& base, const fs::path& corpus_dir, const SweepSpec& sweep, const fs::path& out_dir) {
  std::vector<RunConfig> configs;
  for (const auto& v : sweep.values) {
    RunConfig cfg = base;
    cfg.set(sweep.key, v);
    cfg.train();  // fail before any training starts
    cfg.reward();
    configs.push_back(std::move(cfg));
  }
  fs::create_directories(out_dir);
  std::ostringstream out;
  out << kAblationHeader << '\n';
  for (std::size_t k = 0; k < configs.size(); ++k) {
    const auto& cfg = configs[k];
    const fs::path run_dir = out_dir / (sweep.key + "-" + sweep.values[k]);
    const auto history = train_to_dir(cfg, corpus_dir, run_dir);
    const auto m = eval_from_dir(run_dir, corpus_dir, run_dir);
    const double ema = history.steps.empty() ? 0.0 : history.steps.back().reward_ema;
    out << sweep.key << ',' << sweep.values[k] << ',' << cfg.get("selector") << ',' << cfg.get("head") << ','
        << num(m.auc) << ',' << num(m.f1) << ',' << num(m.p_at_50) << ',' << num(m.p_at_100) << ','
        << num(m.evidence_recall) << ',' << num(m.mean_bridge_mentions_pos) << ','
        << num(m.mean_bridge_mentions_na) << ',' << num(ema) << '\n';
  }
  write_text(out_dir / "ablation.csv", out.str());
  return configs.size();
}

std::vector<fs::path> report(const std::vector<fs::path>& inputs, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  const auto emit = [&](const std::string& name, const std::string& svg) {
    written.push_back(out_dir / name);
    write_text(written.back(), svg);
  };

  for (const auto& in : inputs) {
    const Table t = read_csv(in);
    const std::string header = [&] {
      std::string h;
      for (std::size_t k = 0; k < t.header.size(); ++k) h += (k ? "," : "") + t.header[k];
      return h;
    }();
    const std::string label = label_for(in);

    if (header == kHistoryHeader) {
      emit("reward-curve-" + label + ".svg",
           line_plot_svg("Reward during training (" + label + ")", "step", "reward",
                         {{"batch reward", t.numbers("step"), t.numbers("reward")},
                          {"EMA(0.99)", t.numbers("step"), t.numbers("reward_ema")}}));
    } else if (header == kAblationHeader) {
      std::map<std::string, std::vector<std::size_t>> by_key;
      for (std::size_t r = 0; r < t.rows.size(); ++r) by_key[t.rows[r][0]].push_back(r);
      for (const auto& [key, rows] : by_key) {
        const bool numeric = std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return is_number(t.rows[r][1]); });
        Series f1{"best F1", {}, {}}, recall{"evidence recall", {}, {}};
        std::vector<std::string> cats;
        for (std::size_t r : rows) {
          const double x = numeric ? std::strtod(t.rows[r][1].c_str(), nullptr) : static_cast<double>(cats.size());
          cats.push_back(t.rows[r][1]);
          f1.x.push_back(x);
          f1.y.push_back(std::strtod(t.rows[r][t.column("f1")].c_str(), nullptr));
          recall.x.push_back(x);
          recall.y.push_back(std::strtod(t.rows[r][t.column("evidence_recall")].c_str(), nullptr));
        }
        const std::string title = "F1 vs " + key;
        emit("f1-vs-" + key + ".svg", numeric ? line_plot_svg(title, key, "score", {f1, recall})
                                              : bar_plot_svg(title, key, "score", cats, {f1, recall}));
      }
    } else if (header == kSelectionHeader) {
      const auto type_col = t.column("bag_type");
      const auto path_col = t.column("path_type");
      const auto count_col = t.column("bridge_mentions");
      std::map<int, std::pair<double, double>> bins;  // mentions -> (positive paths, N/A paths)
      for (const auto& r : t.rows) {
        if (r[type_col] != "positive") continue;
        const int c = std::atoi(r[count_col].c_str());
        if (r[path_col] == "positive") bins[c].first += 1;
        else if (r[path_col] == "na") bins[c].second += 1;
      }
      std::vector<std::string> cats;
      Series pos{"positive paths", {}, {}}, na{"N/A paths", {}, {}};
      for (const auto& [c, counts] : bins) {
        cats.push_back(std::to_string(c));
        pos.y.push_back(counts.first);
        na.y.push_back(counts.second);
      }
      emit("bridge-histogram-" + label + ".svg",
           bar_plot_svg("Bridge mentions in selected sentences (" + label + ")", "bridge mentions", "paths", cats,
                        {pos, na}));
    } else if (header == kMetricsHeader || header == "k,precision") {
      continue;
    } else {
      throw DataError(in.string() + ": unrecognised CSV header `" + header + "`");
    }
  }
  return written;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reward-driven evidence sentence selection for cross-document relation extraction", "reic"};
  app.require_subcommand(1);

  std::string config_path, out_dir, corpus_dir, model_dir, selector, head, sweep_text, split_name = "eval";
  std::vector<std::string> sets, inputs;
  std::vector<std::size_t> precision_at;

  const auto add_config_flags = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file with `key = value` lines")->check(CLI::ExistingFile);
    sub->add_option("--set", sets, "override one config key (key=value), repeatable");
  };

  auto* gen = app.add_subcommand("gen-corpus", "generate a planted-evidence corpus and embedding store");
  add_config_flags(gen);
  gen->add_option("--out", out_dir, "output directory")->required();

  auto* tr = app.add_subcommand("train", "train a selector and relation head");
  add_config_flags(tr);
  tr->add_option("--corpus", corpus_dir, "directory written by gen-corpus")->required()->check(CLI::ExistingDirectory);
  tr->add_option("--selector", selector, "reic|snippet|bridge|onestep")
      ->check(CLI::IsMember({"reic", "snippet", "bridge", "onestep"}));
  tr->add_option("--head", head, "end2end|threshold")->check(CLI::IsMember({"end2end", "threshold"}));
  tr->add_option("--out", out_dir, "output directory")->required();

  auto* ev = app.add_subcommand("eval", "evaluate a trained model");
  ev->add_option("--model", model_dir, "directory written by train")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--corpus", corpus_dir, "directory written by gen-corpus")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--out", out_dir, "output directory (default: the model directory)");
  ev->add_option("--split", split_name, "eval|train")->check(CLI::IsMember({"eval", "train"}));
  ev->add_option("--precision-at", precision_at, "extra precision@k cutoffs, written to precision-at-k.csv")
      ->check(CLI::PositiveNumber);

  auto* ab = app.add_subcommand("ablate", "train and evaluate once per sweep value");
  add_config_flags(ab);
  ab->add_option("--corpus", corpus_dir, "directory written by gen-corpus")->required()->check(CLI::ExistingDirectory);
  ab->add_option("--sweep", sweep_text, "key=v1,v2,... (e.g. T=5,10,15,20, lambda=1,10, selector=reic,onestep)")
      ->required();
  ab->add_option("--selector", selector, "reic|snippet|bridge|onestep")
      ->check(CLI::IsMember({"reic", "snippet", "bridge", "onestep"}));
  ab->add_option("--head", head, "end2end|threshold")->check(CLI::IsMember({"end2end", "threshold"}));
  ab->add_option("--out", out_dir, "output directory")->required();

  auto* rep = app.add_subcommand("report", "render SVG plots from history, ablation and selection CSVs");
  rep->add_option("--in", inputs, "CSV files")->required()->check(CLI::ExistingFile);
  rep->add_option("--out", out_dir, "output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "reic: " << e.what() << "\n" << "run `reic --help` for usage\n";
    return 2;
  }

  const auto resolve = [&] {
    RunConfig cfg = config_path.empty() ? RunConfig() : RunConfig::from_file(config_path);
    for (const auto& s : sets) cfg.assign(s);
    if (!selector.empty()) cfg.set("selector", selector);
    if (!head.empty()) cfg.set("head", head);
    return cfg;
  };

  try {
    if (*gen) {
      gen_corpus(resolve(), out_dir);
      out << "wrote corpus to " << out_dir << '\n';
    } else if (*tr) {
      const auto history = train_to_dir(resolve(), corpus_dir, out_dir);
      out << "trained " << history.steps.size() << " steps";
      if (!history.steps.empty()) out << ", final reward EMA " << num(history.steps.back().reward_ema);
      out << "\nwrote " << out_dir << '\n';
    } else if (*ev) {
      const auto m = eval_from_dir(model_dir, corpus_dir, out_dir.empty() ? fs::path(model_dir) : fs::path(out_dir),
                                   split_name, precision_at);
      out << metrics_csv(m);
    } else if (*ab) {
      const auto sweep = parse_sweep(sweep_text);
      const auto rows = ablate(resolve(), corpus_dir, sweep, out_dir);
      out << "wrote " << rows << " rows to " << (fs::path(out_dir) / "ablation.csv").string() << '\n';
    } else if (*rep) {
      std::vector<fs::path> paths(inputs.begin(), inputs.end());
      for (const auto& p : report(paths, out_dir)) out << "wrote " << p.string() << '\n';
    }
  } catch (const ConfigError& e) {
    err << "reic: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "reic: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace reic::app
