#include "simast/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "parallel.hpp"
#include "random.hpp"
#include "simast/error.hpp"
#include "simast/optim.hpp"

namespace simast {

using ad::Tensor;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Prediction predict(const PreparedPair& pair, const Embeddings& embeddings, const ModelParams& params,
                   const ModelConfig& config) {
  const Attention original = encode(pair.original, embeddings, params, config);
  const Attention revised = encode(pair.revised, embeddings, params, config);
  return compare_and_predict(original.representation, revised.representation, params, config);
}

// Forward and backward for one sample; returns its loss.
double accumulate_sample(const PreparedPair& pair, const Embeddings& embeddings, const ModelParams& params,
                         const ModelConfig& config) {
  const Prediction p = predict(pair, embeddings, params, config);
  const Tensor loss = sample_loss(p.probabilities, pair.label, config.weight_o, config.weight_r);
  loss.backward();
  return loss.item();
}

std::vector<int> labels_of(const std::vector<PreparedPair>& pairs) {
  std::vector<int> labels;
  labels.reserve(pairs.size());
  for (const auto& p : pairs) labels.push_back(p.label);
  return labels;
}

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_metrics(std::ostream& out, const MetricRow& m) {
  out << format_value(m.accuracy) << ',' << format_value(m.f1) << ',' << format_value(m.auc) << ','
      << format_value(m.mcc);
}

}  // namespace

ModelConfig resolve_class_weights(const ModelConfig& config, const std::vector<int>& labels) {
  ModelConfig out = config;
  if (config.class_weights == ClassWeighting::Fixed) return out;
  const ClassWeights w = class_weights(labels);
  if (config.class_weights == ClassWeighting::Balanced) {
    out.weight_o = w.weight_o;
    out.weight_r = w.weight_r;
  } else {
    out.weight_o = w.weight_r;
    out.weight_r = w.weight_o;
  }
  return out;
}

TrainResult train(const ModelConfig& config, const Embeddings& embeddings,
                  const std::vector<PreparedPair>& train_pairs,
                  const std::vector<PreparedPair>& eval_pairs, const TrainOptions& options) {
  if (train_pairs.empty()) throw DataError("training needs at least one pair");
  if (options.batch_size == 0) throw ConfigError("batch size must be positive");
  config.validate();

  TrainResult result;
  result.config = resolve_class_weights(config, labels_of(train_pairs));
  const ModelConfig& cfg = result.config;
  result.params = ModelParams::init(cfg, options.seed);
  std::vector<Tensor> trainable = result.params.trainable(cfg);
  ad::Adam adam(trainable, {.learning_rate = cfg.learning_rate});

  const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, options.batch_size));
  std::vector<ModelParams> workers;
  std::vector<std::vector<Tensor>> worker_tensors;
  for (std::size_t w = 0; threads > 1 && w < threads; ++w) {
    workers.push_back(result.params.clone());
    worker_tensors.push_back(workers.back().trainable(cfg));
  }

  std::vector<std::size_t> order(train_pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffle_rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto& monitored = eval_pairs.empty() ? train_pairs : eval_pairs;

  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    rnd::shuffle(order, shuffle_rng);
    double total = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += options.batch_size) {
      const std::size_t end = std::min(order.size(), begin + options.batch_size);
      const std::size_t count = end - begin;
      if (workers.empty()) {
        for (std::size_t k = begin; k < end; ++k) {
          total += accumulate_sample(train_pairs[order[k]], embeddings, result.params, cfg);
        }
      } else {
        for (auto& tensors : worker_tensors) {
          for (std::size_t j = 0; j < tensors.size(); ++j) {
            std::ranges::copy(trainable[j].data(), tensors[j].mutable_data().begin());
            tensors[j].zero_grad();
          }
        }
        std::vector<double> losses(count);
        const std::size_t used = std::min(threads, count);
        const std::size_t chunk = (count + used - 1) / used;
        detail::parallel_for(used, used, [&](std::size_t w) {
          for (std::size_t k = w * chunk; k < std::min(count, (w + 1) * chunk); ++k) {
            losses[k] = accumulate_sample(train_pairs[order[begin + k]], embeddings, workers[w], cfg);
          }
        });
        for (std::size_t w = 0; w < used; ++w) {
          for (std::size_t j = 0; j < trainable.size(); ++j) {
            if (!worker_tensors[w][j].has_grad()) continue;
            auto dst = trainable[j].mutable_grad();
            auto src = worker_tensors[w][j].grad();
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
          }
        }
        for (double l : losses) total += l;
      }
      const Tensor penalty = ad::scale(l2_penalty(result.params, cfg), cfg.l2);
      penalty.backward();
      total += penalty.item();
      adam.step();
    }
    const Evaluation ev = evaluate(result.params, cfg, embeddings, monitored, options.threads);
    result.history.push_back({epoch, total / static_cast<double>(train_pairs.size()), metric_row(ev)});
  }
  return result;
}

Evaluation evaluate(const ModelParams& params, const ModelConfig& config, const Embeddings& embeddings,
                    const std::vector<PreparedPair>& pairs, std::size_t threads) {
  Evaluation ev;
  ev.scores.resize(pairs.size());
  ev.labels = labels_of(pairs);
  detail::parallel_for(pairs.size(), threads, [&](std::size_t i) {
    ad::NoGradGuard guard;
    ev.scores[i] = predict(pairs[i], embeddings, params, config).probabilities.data()[1];
  });
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double accept = ev.scores[i];
    ev.counts.add(ev.labels[i], accept > 1.0 - accept ? 1 : 0);
  }
  return ev;
}

MetricRow metric_row(const Evaluation& ev) {
  if (ev.counts.total() == 0) return {kNaN, kNaN, kNaN, kNaN};
  MetricRow row{accuracy(ev.counts), f1(ev.counts), kNaN, mcc(ev.counts)};
  const auto positives = std::count(ev.labels.begin(), ev.labels.end(), 1);
  if (positives > 0 && positives < static_cast<std::ptrdiff_t>(ev.labels.size())) {
    row.auc = auc(ev.scores, ev.labels);
  }
  return row;
}

std::vector<RepetitionResult> run_repetitions(const ModelConfig& config, const Embeddings& embeddings,
                                              const std::vector<PreparedPair>& pairs,
                                              const RepeatOptions& options) {
  if (options.repetitions == 0) throw ConfigError("repetitions must be at least 1");
  std::vector<RepetitionResult> out;
  for (std::size_t k = 0; k < options.repetitions; ++k) {
    const std::uint64_t seed = options.base_seed + k;
    const Split<PreparedPair> split = stratified_split(pairs, options.train_fraction, seed);
    const TrainOptions train_options{options.epochs, options.batch_size, seed, options.threads};
    const TrainResult trained = train(config, embeddings, split.train, split.test, train_options);
    MetricRow metrics = trained.history.empty()
                            ? metric_row(evaluate(trained.params, trained.config, embeddings, split.test,
                                                  options.threads))
                            : trained.history.back().metrics;
    out.push_back({k, seed, metrics});
  }
  return out;
}

void write_history_csv(std::ostream& out, const std::vector<EpochRecord>& history) {
  out << "epoch,loss,accuracy,f1,auc,mcc\n";
  for (const auto& e : history) {
    out << e.epoch << ',' << format_value(e.loss) << ',';
    write_metrics(out, e.metrics);
    out << '\n';
  }
}

void write_metrics_csv(std::ostream& out, const std::vector<RepetitionResult>& rows) {
  out << "repetition,seed,accuracy,f1,auc,mcc\n";
  MetricRow mean;
  for (const auto& r : rows) {
    out << r.repetition << ',' << r.seed << ',';
    write_metrics(out, r.metrics);
    out << '\n';
    mean.accuracy += r.metrics.accuracy;
    mean.f1 += r.metrics.f1;
    mean.auc += r.metrics.auc;
    mean.mcc += r.metrics.mcc;
  }
  if (rows.empty()) return;
  const auto n = static_cast<double>(rows.size());
  mean = {mean.accuracy / n, mean.f1 / n, mean.auc / n, mean.mcc / n};
  out << "mean,,";
  write_metrics(out, mean);
  out << '\n';
}

std::map<std::string, std::vector<double>> read_metrics_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
  };
  std::string line;
  if (!std::getline(in, line)) throw DataError("metrics CSV is empty");
  const std::vector<std::string> header = split(line);
  if (header.size() < 3 || header[0] != "repetition" || header[1] != "seed") {
    throw DataError("metrics CSV header must start with repetition,seed");
  }
  std::map<std::string, std::vector<double>> out;
  for (std::size_t c = 2; c < header.size(); ++c) out[header[c]];
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line);
    if (fields[0] == "mean") continue;
    if (fields.size() != header.size()) {
      throw DataError("metrics CSV line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields");
    }
    for (std::size_t c = 2; c < header.size(); ++c) {
      try {
        std::size_t used = 0;
        const double v = std::stod(fields[c], &used);
        if (used != fields[c].size()) throw std::invalid_argument(fields[c]);
        out[header[c]].push_back(v);
      } catch (const std::exception&) {
        throw DataError("metrics CSV line " + std::to_string(line_no) + ": bad number '" + fields[c] + "'");
      }
    }
  }
  return out;
}

}  // namespace simast
