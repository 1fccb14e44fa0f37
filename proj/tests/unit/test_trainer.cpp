#include <cmath>
#include <sstream>

#include "doctest.h"
#include "simast/error.hpp"
#include "simast/synthetic.hpp"
#include "simast/trainer.hpp"

using namespace simast;
using ad::Tensor;

namespace {

struct Fixture {
  ModelConfig config;
  Embeddings embeddings;
  std::vector<PreparedPair> pairs;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    const auto records = generate_synthetic({.pairs = 24, .seed = 3, .accept_fraction = 0.5});
    const auto pre = preprocess_all(records, PreprocessOptions{});
    Corpus corpus;
    for (const auto& p : pre) {
      corpus.push_back(p.original.sequence.labels);
      corpus.push_back(p.revised.sequence.labels);
    }
    out.embeddings.vocab = build_vocab(corpus);
    out.embeddings.table =
        train_skipgram(corpus, out.embeddings.vocab, {.dim = 6, .window = 2, .negatives = 2, .epochs = 1, .seed = 1});
    out.pairs = prepare(pre);
    out.config.embedding_dim = 6;
    out.config.hidden_dim = 4;
    out.config.gcn_layers = 2;
    return out;
  }();
  return f;
}

std::vector<double> flat(const ModelParams& p, const ModelConfig& c) {
  std::vector<double> out;
  for (const auto& t : p.trainable(c)) out.insert(out.end(), t.data().begin(), t.data().end());
  return out;
}

}  // namespace

TEST_CASE("resolve class weights") {
  ModelConfig c;
  const std::vector<int> labels = {1, 0, 0, 0};
  const ModelConfig b = resolve_class_weights(c, labels);
  CHECK(b.weight_o == doctest::Approx(4.0 / 6.0));
  CHECK(b.weight_r == doctest::Approx(2.0));
  c.class_weights = ClassWeighting::ByLabel;
  const ModelConfig l = resolve_class_weights(c, labels);
  CHECK(l.weight_o == doctest::Approx(2.0));
  CHECK(l.weight_r == doctest::Approx(4.0 / 6.0));
  c.class_weights = ClassWeighting::Fixed;
  c.weight_o = 3.0;
  CHECK(resolve_class_weights(c, {1, 1}).weight_o == 3.0);
  c.class_weights = ClassWeighting::Balanced;
  CHECK_THROWS_AS(resolve_class_weights(c, {1, 1}), DataError);
}

TEST_CASE("zero epochs returns the initial parameters") {
  const Fixture& f = fixture();
  const TrainResult r = train(f.config, f.embeddings, f.pairs, {}, {.epochs = 0, .batch_size = 8, .seed = 5});
  CHECK(r.history.empty());
  CHECK(flat(r.params, r.config) == flat(ModelParams::init(r.config, 5), r.config));
}

TEST_CASE("training is deterministic in the seed") {
  const Fixture& f = fixture();
  const TrainOptions o{.epochs = 2, .batch_size = 8, .seed = 2};
  const TrainResult a = train(f.config, f.embeddings, f.pairs, {}, o);
  const TrainResult b = train(f.config, f.embeddings, f.pairs, {}, o);
  CHECK(flat(a.params, a.config) == flat(b.params, b.config));
  REQUIRE(a.history.size() == 2);
  CHECK(a.history[1].loss == b.history[1].loss);
  CHECK(a.history[0].epoch == 1);
  const TrainResult c = train(f.config, f.embeddings, f.pairs, {}, {.epochs = 2, .batch_size = 8, .seed = 3});
  CHECK(flat(a.params, a.config) != flat(c.params, c.config));
}

TEST_CASE("threaded training is deterministic for a fixed thread count") {
  const Fixture& f = fixture();
  const TrainOptions o{.epochs = 1, .batch_size = 8, .seed = 2, .threads = 3};
  const TrainResult a = train(f.config, f.embeddings, f.pairs, {}, o);
  const TrainResult b = train(f.config, f.embeddings, f.pairs, {}, o);
  CHECK(flat(a.params, a.config) == flat(b.params, b.config));
  const TrainResult serial = train(f.config, f.embeddings, f.pairs, {}, {.epochs = 1, .batch_size = 8, .seed = 2});
  const auto x = flat(a.params, a.config), y = flat(serial.params, serial.config);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(y[i]).epsilon(1e-9));
}

TEST_CASE("training input errors") {
  const Fixture& f = fixture();
  CHECK_THROWS_AS(train(f.config, f.embeddings, {}, {}, {}), DataError);
  CHECK_THROWS_AS(train(f.config, f.embeddings, f.pairs, {}, {.epochs = 1, .batch_size = 0}), ConfigError);
}

TEST_CASE("per-sample gradient accumulation equals the batch loss gradient") {
  const Fixture& f = fixture();
  ModelConfig c = resolve_class_weights(f.config, {1, 0, 0});
  c.l2 = 0.01;
  const ModelParams p = ModelParams::init(c, 4);
  auto params = p.trainable(c);
  auto predict = [&](const PreparedPair& pair) {
    return compare_and_predict(encode(pair.original, f.embeddings, p, c).representation,
                               encode(pair.revised, f.embeddings, p, c).representation, p, c)
        .probabilities;
  };
  std::vector<Tensor> probs;
  std::vector<int> labels;
  for (std::size_t i = 0; i < 5; ++i) {
    probs.push_back(predict(f.pairs[i]));
    labels.push_back(f.pairs[i].label);
  }
  const Tensor batch = weighted_loss(probs, labels, c, p);
  batch.backward();
  std::vector<double> g_batch;
  for (auto& t : params) {
    g_batch.insert(g_batch.end(), t.grad().begin(), t.grad().end());
    t.zero_grad();
  }
  double total = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    const Tensor l = sample_loss(predict(f.pairs[i]), f.pairs[i].label, c.weight_o, c.weight_r);
    l.backward();
    total += l.item();
  }
  const Tensor penalty = ad::scale(l2_penalty(p, c), c.l2);
  penalty.backward();
  total += penalty.item();
  CHECK(total == doctest::Approx(batch.item()).epsilon(1e-12));
  std::size_t k = 0;
  for (auto& t : params)
    for (double g : t.grad()) CHECK(std::fabs(g - g_batch[k++]) <= 1e-9);
}

TEST_CASE("evaluate and metric rows") {
  const Fixture& f = fixture();
  const ModelParams p = ModelParams::init(f.config, 1);
  const Evaluation e = evaluate(p, f.config, f.embeddings, f.pairs);
  CHECK(e.scores.size() == f.pairs.size());
  CHECK(e.counts.total() == f.pairs.size());
  for (std::size_t i = 0; i < e.scores.size(); ++i) {
    CHECK(e.labels[i] == f.pairs[i].label);
    CHECK(e.scores[i] > 0.0);
    CHECK(e.scores[i] < 1.0);
  }
  const Evaluation threaded = evaluate(p, f.config, f.embeddings, f.pairs, 4);
  CHECK(threaded.scores == e.scores);
  const MetricRow row = metric_row(e);
  CHECK(row.accuracy == accuracy(e.counts));
  CHECK(row.auc == auc(e.scores, e.labels));

  const std::vector<PreparedPair> one_class(f.pairs.begin(), f.pairs.begin() + 1);
  CHECK(std::isnan(metric_row(evaluate(p, f.config, f.embeddings, one_class)).auc));
  CHECK(std::isnan(metric_row(Evaluation{}).accuracy));
}

TEST_CASE("repetitions are deterministic and the CSV round trips") {
  const Fixture& f = fixture();
  const RepeatOptions o{.repetitions = 2, .base_seed = 10, .train_fraction = 0.75, .epochs = 1, .batch_size = 8};
  const auto a = run_repetitions(f.config, f.embeddings, f.pairs, o);
  const auto b = run_repetitions(f.config, f.embeddings, f.pairs, o);
  REQUIRE(a.size() == 2);
  CHECK(a[1].seed == 11);
  std::ostringstream sa, sb;
  write_metrics_csv(sa, a);
  write_metrics_csv(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind("repetition,seed,accuracy,f1,auc,mcc\n", 0) == 0);
  CHECK(sa.str().find("\nmean,") != std::string::npos);

  std::istringstream in(sa.str());
  const auto cols = read_metrics_csv(in);
  REQUIRE(cols.at("accuracy").size() == 2);
  CHECK(cols.at("accuracy")[0] == doctest::Approx(a[0].metrics.accuracy).epsilon(1e-6));
  CHECK(cols.at("mcc")[1] == doctest::Approx(a[1].metrics.mcc).epsilon(1e-6));
  std::istringstream bad("repetition,seed,accuracy\n1,1,abc\n");
  CHECK_THROWS_AS(read_metrics_csv(bad), DataError);
}

TEST_CASE("history CSV") {
  std::ostringstream out;
  write_history_csv(out, {{1, 0.5, {0.75, 0.8, std::nan(""), 0.25}}});
  CHECK(out.str() == "epoch,loss,accuracy,f1,auc,mcc\n1,0.500000,0.750000,0.800000,nan,0.250000\n");
}
