// simast: preprocessing, embedding, training and evaluation pipeline for
// code-review acceptance prediction.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "simast/archive.hpp"
#include "simast/config.hpp"
#include "simast/dataset.hpp"
#include "simast/embedding.hpp"
#include "simast/error.hpp"
#include "simast/kernels.hpp"
#include "simast/report.hpp"
#include "simast/stats.hpp"
#include "simast/synthetic.hpp"
#include "simast/trainer.hpp"

namespace fs = std::filesystem;
using namespace simast;

namespace {

constexpr int kUsageExit = 1;
constexpr int kDataExit = 2;

// Writes to `path`, or to stdout when it is empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw DataError("cannot write " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

ModelConfig config_for(const std::string& path, const Embeddings& embeddings) {
  ModelConfig config = path.empty() ? ModelConfig{} : load_config(path);
  if (config.embedding_dim != embeddings.table.dim()) {
    throw ConfigError("config embedding_dim " + std::to_string(config.embedding_dim) +
                      " does not match the embeddings (" + std::to_string(embeddings.table.dim()) + ")");
  }
  return config;
}

std::string fmt(double v, int digits = 4) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void note_degenerate(const ConfusionCounts& c) {
  if (f1_degenerate(c)) std::cerr << "note: F1 undefined for these counts, reported as 0\n";
  if (mcc_degenerate(c)) std::cerr << "note: MCC undefined for these counts, reported as 0\n";
}

struct PreprocessArgs {
  std::string input, output, keep_rule;
  bool no_simplify = false;
};

struct EmbeddingArgs {
  std::string input, output;
  SkipGramOptions skipgram;
};

struct TrainArgs {
  std::string pairs, embeddings, config, checkpoint, history;
  double holdout = 0.0;
  TrainOptions options;
};

struct EvalArgs {
  std::string pairs, checkpoint, embeddings, output;
};

struct RepeatArgs {
  std::string pairs, embeddings, config, output;
  RepeatOptions options;
};

struct CompareArgs {
  std::string ours, theirs, ours_name = "ours", theirs_name = "theirs", output;
};

struct StatsArgs {
  std::string input, name = "corpus", output;
};

struct SynthArgs {
  std::string output;
  SyntheticOptions options;
};

void run_preprocess(const PreprocessArgs& a, std::size_t threads) {
  PreprocessOptions opts;
  opts.simplify = !a.no_simplify;
  if (!a.keep_rule.empty()) opts.keep_rule = KeepRule(split_list(a.keep_rule));
  const auto records = load_jsonl(a.input);
  save_pairs(a.output, preprocess_all(records, opts, threads));
  std::cerr << "preprocessed " << records.size() << " records\n";
}

void run_train_embeddings(const EmbeddingArgs& a) {
  Corpus corpus;
  for (const auto& p : load_pairs(a.input)) {
    corpus.push_back(p.original.sequence.labels);
    corpus.push_back(p.revised.sequence.labels);
  }
  Embeddings emb;
  emb.vocab = build_vocab(corpus);
  std::vector<double> losses;
  emb.table = train_skipgram(corpus, emb.vocab, a.skipgram, &losses);
  save_embeddings(a.output, emb);
  for (std::size_t e = 0; e < losses.size(); ++e) {
    std::cerr << "epoch " << e + 1 << " loss " << fmt(losses[e], 6) << '\n';
  }
}

void run_train(const TrainArgs& a) {
  const Embeddings emb = load_embeddings(a.embeddings);
  const ModelConfig config = config_for(a.config, emb);
  const auto pairs = prepare(load_pairs(a.pairs), config.normalization);
  std::vector<PreparedPair> train_set = pairs, eval_set;
  if (a.holdout > 0.0) {
    auto split = stratified_split(pairs, 1.0 - a.holdout, a.options.seed);
    train_set = std::move(split.train);
    eval_set = std::move(split.test);
  }
  const TrainResult result = train(config, emb, train_set, eval_set, a.options);
  if (!a.checkpoint.empty()) {
    Archive archive = result.params.to_archive(result.config);
    archive.metadata = format_config(result.config);
    save_archive(a.checkpoint, archive);
  }
  Output out(a.history);
  write_history_csv(out.stream(), result.history);
}

void run_eval(const EvalArgs& a) {
  const Embeddings emb = load_embeddings(a.embeddings);
  const Archive archive = load_archive(a.checkpoint);
  const ModelConfig config = parse_config(archive.metadata);
  const ModelParams params = ModelParams::from_archive(archive, config);
  const auto pairs = prepare(load_pairs(a.pairs), config.normalization);
  const Evaluation ev = evaluate(params, config, emb, pairs);
  const MetricRow m = metric_row(ev);
  note_degenerate(ev.counts);
  Output out(a.output);
  out.stream() << "pairs,accuracy,precision,recall,f1,auc,mcc\n"
               << pairs.size() << ',' << fmt(m.accuracy, 6) << ',' << fmt(precision(ev.counts), 6) << ','
               << fmt(recall(ev.counts), 6) << ',' << fmt(m.f1, 6) << ',' << fmt(m.auc, 6) << ','
               << fmt(m.mcc, 6) << '\n';
}

void run_repeat(const RepeatArgs& a) {
  const Embeddings emb = load_embeddings(a.embeddings);
  const ModelConfig config = config_for(a.config, emb);
  const auto pairs = prepare(load_pairs(a.pairs), config.normalization);
  const auto rows = run_repetitions(config, emb, pairs, a.options);
  Output out(a.output);
  write_metrics_csv(out.stream(), rows);
}

void run_compare(const CompareArgs& a) {
  auto read = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    return read_metrics_csv(in);
  };
  const auto ours = read(a.ours);
  const auto theirs = read(a.theirs);
  if (ours.size() != theirs.size()) throw DataError("metric columns differ between the two files");
  Output output(a.output);
  std::ostream& out = output.stream();
  out << "metric,model,mean,p(delta),outcome\n";
  std::size_t wins = 0, ties = 0, losses = 0;
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  for (const auto& [metric, xs] : ours) {
    const auto it = theirs.find(metric);
    if (it == theirs.end()) throw DataError("metric '" + metric + "' missing from " + a.theirs);
    if (it->second.size() != xs.size()) {
      throw DataError("metric '" + metric + "': " + std::to_string(xs.size()) + " vs " +
                      std::to_string(it->second.size()) + " repetitions");
    }
    const Verdict v = win_tie_loss(xs, it->second);
    wins += v.outcome == Outcome::Win;
    ties += v.outcome == Outcome::Tie;
    losses += v.outcome == Outcome::Loss;
    out << metric << ',' << a.ours_name << ',' << fmt(mean(xs)) << ",,\n";
    out << metric << ',' << a.theirs_name << ',' << fmt(mean(it->second)) << ',' << format_p_delta(v) << ','
        << outcome_name(v.outcome) << '\n';
  }
  out << "Win/Tie/Loss,,,," << wins << '/' << ties << '/' << losses << '\n';
}

void run_stats(const StatsArgs& a) {
  const auto pairs = load_pairs(a.input);
  const auto sizes = tree_sizes(pairs);
  Output out(a.output);
  write_tree_stats_csv(out.stream(), a.name, tree_stats(sizes));
}

void run_synth(const SynthArgs& a) {
  Output out(a.output);
  write_jsonl(out.stream(), generate_synthetic(a.options));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simast: AST-graph models of code-review acceptance"};
  app.require_subcommand(1);
  std::size_t threads = 1;
  std::string backend;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--backend", backend, "Kernel backend (scalar, avx2)");

  PreprocessArgs pre;
  auto* c_pre = app.add_subcommand("preprocess", "Parse, simplify and serialize review records");
  c_pre->add_option("--input", pre.input, "Records JSONL")->required()->check(CLI::ExistingFile);
  c_pre->add_option("--output", pre.output, "Pairs JSONL")->required();
  c_pre->add_flag("--no-simplify", pre.no_simplify, "Keep full trees");
  c_pre->add_option("--keep-rule", pre.keep_rule, "Comma-separated label substrings to keep");

  EmbeddingArgs emb;
  auto* c_emb = app.add_subcommand("train-embeddings", "Skip-gram embeddings over node labels");
  c_emb->add_option("--input", emb.input, "Pairs JSONL")->required()->check(CLI::ExistingFile);
  c_emb->add_option("--output", emb.output, "Embedding file")->required();
  c_emb->add_option("--dim", emb.skipgram.dim);
  c_emb->add_option("--window", emb.skipgram.window);
  c_emb->add_option("--negatives", emb.skipgram.negatives);
  c_emb->add_option("--epochs", emb.skipgram.epochs);
  c_emb->add_option("--seed", emb.skipgram.seed);

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train a model");
  c_train->add_option("--pairs", tr.pairs)->required()->check(CLI::ExistingFile);
  c_train->add_option("--embeddings", tr.embeddings)->required()->check(CLI::ExistingFile);
  c_train->add_option("--config", tr.config)->check(CLI::ExistingFile);
  c_train->add_option("--seed", tr.options.seed);
  c_train->add_option("--epochs", tr.options.epochs);
  c_train->add_option("--batch", tr.options.batch_size)->check(CLI::PositiveNumber);
  c_train->add_option("--holdout", tr.holdout, "Fraction held out for the history metrics")
      ->check(CLI::Range(0.0, 0.99));
  c_train->add_option("--checkpoint", tr.checkpoint);
  c_train->add_option("--history", tr.history, "History CSV (stdout if omitted)");

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  c_eval->add_option("--pairs", ev.pairs)->required()->check(CLI::ExistingFile);
  c_eval->add_option("--checkpoint", ev.checkpoint)->required()->check(CLI::ExistingFile);
  c_eval->add_option("--embeddings", ev.embeddings)->required()->check(CLI::ExistingFile);
  c_eval->add_option("--output", ev.output);

  RepeatArgs rep;
  auto* c_rep = app.add_subcommand("repeat", "Repeated split/train/evaluate runs");
  c_rep->add_option("--pairs", rep.pairs)->required()->check(CLI::ExistingFile);
  c_rep->add_option("--embeddings", rep.embeddings)->required()->check(CLI::ExistingFile);
  c_rep->add_option("--config", rep.config)->check(CLI::ExistingFile);
  c_rep->add_option("--reps", rep.options.repetitions)->check(CLI::PositiveNumber);
  c_rep->add_option("--base-seed", rep.options.base_seed);
  c_rep->add_option("--epochs", rep.options.epochs);
  c_rep->add_option("--batch", rep.options.batch_size)->check(CLI::PositiveNumber);
  c_rep->add_option("--train-fraction", rep.options.train_fraction)->check(CLI::Range(0.01, 0.99));
  c_rep->add_option("--output", rep.output);

  CompareArgs cmp;
  auto* c_cmp = app.add_subcommand("compare", "Wilcoxon / Cliff's delta comparison of two metric CSVs");
  c_cmp->add_option("--ours", cmp.ours)->required()->check(CLI::ExistingFile);
  c_cmp->add_option("--theirs", cmp.theirs)->required()->check(CLI::ExistingFile);
  c_cmp->add_option("--ours-name", cmp.ours_name);
  c_cmp->add_option("--theirs-name", cmp.theirs_name);
  c_cmp->add_option("--output", cmp.output);

  StatsArgs st;
  auto* c_stats = app.add_subcommand("stats", "Tree size statistics of a pairs file");
  c_stats->add_option("--input", st.input)->required()->check(CLI::ExistingFile);
  c_stats->add_option("--name", st.name);
  c_stats->add_option("--output", st.output);

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synth", "Generate a synthetic review corpus");
  c_syn->add_option("--pairs", syn.options.pairs);
  c_syn->add_option("--seed", syn.options.seed);
  c_syn->add_option("--accept-fraction", syn.options.accept_fraction)->check(CLI::Range(0.0, 1.0));
  c_syn->add_option("--output", syn.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }

  try {
    if (backend == "scalar") kernels::select(kernels::Backend::Scalar);
    else if (backend == "avx2") kernels::select(kernels::Backend::Avx2);
    else if (!backend.empty()) throw ConfigError("unknown backend '" + backend + "'");

    tr.options.threads = threads;
    rep.options.threads = threads;
    if (*c_pre) run_preprocess(pre, threads);
    else if (*c_emb) run_train_embeddings(emb);
    else if (*c_train) run_train(tr);
    else if (*c_eval) run_eval(ev);
    else if (*c_rep) run_repeat(rep);
    else if (*c_cmp) run_compare(cmp);
    else if (*c_stats) run_stats(st);
    else if (*c_syn) run_synth(syn);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataExit;
  }
  return 0;
}
