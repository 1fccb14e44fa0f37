#include "simast/model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "random.hpp"
#include "simast/error.hpp"

namespace simast {

using ad::Shape;
using ad::Tensor;

namespace {

Tensor uniform_tensor(Shape shape, double range, std::mt19937_64& rng) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  std::vector<double> data(n);
  for (double& v : data) v = rnd::uniform(rng, -range, range);
  return Tensor::from(std::move(shape), std::move(data), true);
}

Shape classifier_shape(const ModelConfig& c) {
  const std::size_t width = c.representation_dim() * (c.variant == Variant::ConcatCompare ? 2 : 1);
  return {2, width};
}

template <typename F>
void for_each_named(const ModelParams& p, std::size_t layers, F&& f) {
  auto gru = [&](const char* dir, const GruParams& g) {
    const std::string prefix = std::string("gru.") + dir + ".";
    f(prefix + "input_weight", g.input_weight);
    f(prefix + "hidden_gates", g.hidden_gates);
    f(prefix + "hidden_candidate", g.hidden_candidate);
    f(prefix + "bias", g.bias);
  };
  gru("forward", p.forward);
  gru("backward", p.backward);
  for (std::size_t l = 0; l < layers && l < p.gcn.size(); ++l) {
    f("gcn." + std::to_string(l) + ".weight", p.gcn[l].weight);
    f("gcn." + std::to_string(l) + ".bias", p.gcn[l].bias);
  }
  f(std::string("classifier.weight"), p.classifier_weight);
  f(std::string("classifier.bias"), p.classifier_bias);
}

Tensor copy_leaf(const Tensor& t) {
  return Tensor::from(t.shape(), std::vector<double>(t.data().begin(), t.data().end()), true);
}

Tensor run_gru_direction(const Tensor& x, const GruParams& g, bool reverse) {
  const std::size_t n = x.rows();
  const std::size_t h = g.hidden_candidate.shape()[0];
  const Tensor projected = ad::add(ad::matmul(x, g.input_weight), g.bias);
  std::vector<Tensor> states(n);
  Tensor prev = Tensor::zeros({1, h});
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t t = reverse ? n - 1 - step : step;
    const Tensor row = ad::slice_rows(projected, t, t + 1);
    const Tensor gates = ad::sigmoid(
        ad::add(ad::slice_cols(row, 0, 2 * h), ad::matmul(prev, g.hidden_gates)));
    const Tensor update = ad::slice_cols(gates, 0, h);
    const Tensor reset = ad::slice_cols(gates, h, 2 * h);
    const Tensor candidate = ad::tanh(ad::add(ad::slice_cols(row, 2 * h, 3 * h),
                                              ad::matmul(ad::mul(reset, prev), g.hidden_candidate)));
    // h_t = (1 - z) * candidate + z * h_{t-1}
    prev = ad::add(candidate, ad::mul(update, ad::sub(prev, candidate)));
    states[t] = prev;
  }
  return ad::concat_rows(states);
}

}  // namespace

ModelParams ModelParams::init(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  const std::size_t m = config.embedding_dim, h = config.hidden_dim, r = config.representation_dim();
  auto weight_range = [&](std::size_t fan_in, std::size_t fan_out) {
    if (config.init_range > 0) return config.init_range;
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  };
  auto gru = [&] {
    GruParams g;
    g.input_weight = uniform_tensor({m, 3 * h}, weight_range(m, 3 * h), rng);
    g.hidden_gates = uniform_tensor({h, 2 * h}, weight_range(h, 2 * h), rng);
    g.hidden_candidate = uniform_tensor({h, h}, weight_range(h, h), rng);
    g.bias = uniform_tensor({3 * h}, config.bias_init_range, rng);
    return g;
  };
  ModelParams p;
  p.forward = gru();
  p.backward = gru();
  for (std::size_t l = 0; l < config.gcn_layers; ++l) {
    GcnLayer layer;
    layer.weight = uniform_tensor({r, r}, weight_range(r, r), rng);
    layer.bias = uniform_tensor({r}, config.bias_init_range, rng);
    p.gcn.push_back(std::move(layer));
  }
  const Shape cls = classifier_shape(config);
  p.classifier_weight = uniform_tensor(cls, weight_range(cls[1], cls[0]), rng);
  p.classifier_bias = uniform_tensor({2}, config.bias_init_range, rng);
  return p;
}

ModelParams ModelParams::from_archive(const Archive& archive, const ModelConfig& config) {
  ModelParams shapes = init(config, 0);
  ModelParams out = shapes.clone();
  std::vector<Tensor*> slots;
  auto collect = [&](GruParams& g) {
    slots.insert(slots.end(), {&g.input_weight, &g.hidden_gates, &g.hidden_candidate, &g.bias});
  };
  collect(out.forward);
  collect(out.backward);
  for (auto& l : out.gcn) slots.insert(slots.end(), {&l.weight, &l.bias});
  slots.insert(slots.end(), {&out.classifier_weight, &out.classifier_bias});

  std::size_t i = 0;
  for_each_named(shapes, config.gcn_layers, [&](const std::string& name, const Tensor& expected) {
    const Tensor& stored = archive.get(name);
    if (stored.shape() != expected.shape()) {
      throw DataError("checkpoint tensor '" + name + "' has shape " + ad::to_string(stored.shape()) +
                      ", config expects " + ad::to_string(expected.shape()));
    }
    *slots[i++] = copy_leaf(stored);
  });
  return out;
}

Archive ModelParams::to_archive(const ModelConfig& config) const {
  Archive a;
  a.metadata = format_config(config);
  for_each_named(*this, gcn.size(), [&](const std::string& name, const Tensor& t) {
    a.tensors.push_back({name, t});
  });
  return a;
}

std::vector<Tensor> ModelParams::trainable(const ModelConfig& config) const {
  std::vector<Tensor> out;
  const std::size_t layers = config.variant == Variant::NoGcn ? 0 : gcn.size();
  for_each_named(*this, layers, [&](const std::string&, const Tensor& t) { out.push_back(t); });
  return out;
}

std::vector<Tensor> ModelParams::penalized(const ModelConfig& config) const {
  std::vector<Tensor> out;
  for (const GruParams* g : {&forward, &backward}) {
    out.insert(out.end(), {g->input_weight, g->hidden_gates, g->hidden_candidate});
  }
  if (config.variant != Variant::NoGcn) {
    for (const auto& l : gcn) out.push_back(l.weight);
  }
  out.push_back(classifier_weight);
  return out;
}

ModelParams ModelParams::clone() const {
  ModelParams p;
  auto copy_gru = [](const GruParams& g) {
    return GruParams{copy_leaf(g.input_weight), copy_leaf(g.hidden_gates),
                     copy_leaf(g.hidden_candidate), copy_leaf(g.bias)};
  };
  p.forward = copy_gru(forward);
  p.backward = copy_gru(backward);
  for (const auto& l : gcn) p.gcn.push_back({copy_leaf(l.weight), copy_leaf(l.bias)});
  p.classifier_weight = copy_leaf(classifier_weight);
  p.classifier_bias = copy_leaf(classifier_bias);
  return p;
}

Tensor bigru_forward(const Tensor& x, const ModelParams& params) {
  if (x.rank() != 2 || x.rows() == 0) {
    throw ShapeError("bigru_forward expects a non-empty {n, m} input, got " + ad::to_string(x.shape()));
  }
  if (x.cols() != params.forward.input_weight.shape()[0]) {
    throw ShapeError("bigru_forward: input width " + std::to_string(x.cols()) +
                     " does not match GRU input size " +
                     std::to_string(params.forward.input_weight.shape()[0]));
  }
  return ad::concat({run_gru_direction(x, params.forward, false),
                     run_gru_direction(x, params.backward, true)});
}

Tensor gcn_forward(const Tensor& h, const SparseMatrix& propagation, std::span<const GcnLayer> layers,
                   std::size_t layer_count, double slope) {
  if (layer_count != layers.size()) {
    throw ShapeError("gcn_forward: asked for " + std::to_string(layer_count) + " layers but " +
                     std::to_string(layers.size()) + " are configured");
  }
  Tensor out = h;
  for (const GcnLayer& layer : layers) {
    out = ad::leaky_relu(ad::add(ad::matmul(ad::spmm(propagation, out), layer.weight), layer.bias),
                         slope);
  }
  return out;
}

Tensor gcn_forward_dense(const Tensor& h, const Tensor& propagation, std::span<const GcnLayer> layers,
                         std::size_t layer_count, double slope) {
  if (layer_count != layers.size()) {
    throw ShapeError("gcn_forward: asked for " + std::to_string(layer_count) + " layers but " +
                     std::to_string(layers.size()) + " are configured");
  }
  Tensor out = h;
  for (const GcnLayer& layer : layers) {
    out = ad::leaky_relu(ad::add(ad::matmul(ad::matmul(propagation, out), layer.weight), layer.bias),
                         slope);
  }
  return out;
}

Attention attention_pool(const Tensor& context, const Tensor& graph_states) {
  if (context.rank() != 2 || context.shape() != graph_states.shape()) {
    throw ShapeError("attention_pool: shapes " + ad::to_string(context.shape()) + " and " +
                     ad::to_string(graph_states.shape()) + " must be equal {n, d}");
  }
  const std::size_t n = context.rows(), d = context.cols();
  if (n == 0) throw ShapeError("attention_pool: no nodes to attend over");
  const Tensor summary = ad::reshape(ad::sum_rows(graph_states), {d, 1});
  const Tensor scores = ad::reshape(ad::matmul(context, summary), {n});
  const Tensor alpha = ad::softmax(scores);
  const Tensor r = ad::reshape(ad::matmul(ad::reshape(alpha, {1, n}), context), {d});
  return {alpha, r};
}

Attention encode(const FragmentGraph& fragment, const Embeddings& embeddings,
                 const ModelParams& params, const ModelConfig& config) {
  if (fragment.size() == 0) throw ShapeError("encode: empty fragment");
  if (embeddings.table.dim() != config.embedding_dim) {
    throw ConfigError("embedding file has dim " + std::to_string(embeddings.table.dim()) +
                      " but the model expects " + std::to_string(config.embedding_dim));
  }
  const Tensor x = lookup(fragment.labels(), embeddings.vocab, embeddings.table);
  const Tensor context = bigru_forward(x, params);
  if (config.variant == Variant::NoGcn) return attention_pool(context, context);
  const Tensor graph_states = gcn_forward(context, fragment.sparse_propagation(), params.gcn,
                                          config.gcn_layers, config.leaky_slope);
  return attention_pool(context, graph_states);
}

Prediction compare_and_predict(const Tensor& original, const Tensor& revised,
                               const ModelParams& params, const ModelConfig& config) {
  if (original.shape() != revised.shape() || original.rank() != 1) {
    throw ShapeError("compare: representations " + ad::to_string(original.shape()) + " and " +
                     ad::to_string(revised.shape()) + " differ");
  }
  const Tensor combined = config.variant == Variant::ConcatCompare
                              ? ad::concat({original, revised})
                              : ad::sub(original, revised);
  if (combined.size() != params.classifier_weight.shape()[1]) {
    throw ShapeError("compare: classifier expects width " +
                     std::to_string(params.classifier_weight.shape()[1]) + ", got " +
                     std::to_string(combined.size()));
  }
  const Tensor row = ad::reshape(combined, {1, combined.size()});
  const Tensor logits = ad::add(
      ad::reshape(ad::matmul(row, ad::transpose(params.classifier_weight)), {2}),
      params.classifier_bias);
  return {logits, ad::softmax(logits)};
}

Tensor sample_loss(const Tensor& probabilities, int label, double weight_o, double weight_r) {
  if (label == 1) {
    return ad::scale(ad::log(ad::clamp(ad::element(probabilities, 1), 1e-12, 1.0)), -weight_o);
  }
  return ad::scale(ad::log(ad::clamp(ad::element(probabilities, 0), 1e-12, 1.0)), -weight_r);
}

Tensor l2_penalty(const ModelParams& params, const ModelConfig& config) {
  Tensor total;
  for (const Tensor& w : params.penalized(config)) {
    Tensor term = ad::l2_norm_squared(w);
    total = total.defined() ? ad::add(total, term) : term;
  }
  return total;
}

Tensor weighted_loss(std::span<const Tensor> probabilities, std::span<const int> labels,
                     const ModelConfig& config, const ModelParams& params) {
  if (probabilities.size() != labels.size()) {
    throw ShapeError("weighted_loss: " + std::to_string(probabilities.size()) +
                     " predictions for " + std::to_string(labels.size()) + " labels");
  }
  Tensor total = ad::scale(l2_penalty(params, config), config.l2);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    total = ad::add(total, sample_loss(probabilities[i], labels[i], config.weight_o, config.weight_r));
  }
  return total;
}

}  // namespace simast
