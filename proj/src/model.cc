// Copyright 2026 The dotref Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dotref/model.h"

#include <cmath>
#include <fstream>
#include <numeric>

namespace dotref {

using nlohmann::json;
using nn::Matrix;
using nn::Vector;

std::string_view VariantName(Variant variant) {
  switch (variant) {
    case Variant::kContextMlp:
      return "context-mlp";
    case Variant::kContextRn:
      return "context-rn";
    case Variant::kFullMlp:
      return "full-mlp";
    case Variant::kFullRn:
      return "full-rn";
  }
  return "unknown";
}

Variant ParseVariant(std::string_view name) {
  for (Variant v : kAllVariants) {
    if (VariantName(v) == name) return v;
  }
  throw std::invalid_argument("unknown variant '" + std::string(name) +
                              "' (expected context-mlp, context-rn, "
                              "full-mlp or full-rn)");
}

void ModelConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid config: ") + what);
  };
  require(hidden > 0, "hidden must be positive");
  require(embed_dim > 0, "embed_dim must be positive");
  require(dropout >= 0 && dropout < 1, "dropout must be in [0, 1)");
  require(init_range > 0, "init_range must be positive");
  require(learning_rate > 0, "learning_rate must be positive");
  require(grad_clip > 0, "grad_clip must be positive");
  require(adam_beta1 >= 0 && adam_beta1 < 1, "adam_beta1 must be in [0, 1)");
  require(adam_beta2 >= 0 && adam_beta2 < 1, "adam_beta2 must be in [0, 1)");
  require(adam_epsilon > 0, "adam_epsilon must be positive");
  require(epochs > 0, "epochs must be positive");
  require(batch_size > 0, "batch_size must be positive");
  require(!UsesDialogue(variant) || vocab_size > 0,
          "dialogue variants need vocab_size > 0");
}

void to_json(json& j, const ModelConfig& c) {
  j = {{"variant", VariantName(c.variant)},
       {"hidden", c.hidden},
       {"embed_dim", c.embed_dim},
       {"dropout", c.dropout},
       {"init_range", c.init_range},
       {"learning_rate", c.learning_rate},
       {"grad_clip", c.grad_clip},
       {"adam_beta1", c.adam_beta1},
       {"adam_beta2", c.adam_beta2},
       {"adam_epsilon", c.adam_epsilon},
       {"epochs", c.epochs},
       {"batch_size", c.batch_size},
       {"seed", c.seed},
       {"vocab_size", c.vocab_size}};
}

void from_json(const json& j, ModelConfig& c) {
  c.variant = ParseVariant(j.at("variant").get<std::string>());
  j.at("hidden").get_to(c.hidden);
  j.at("embed_dim").get_to(c.embed_dim);
  j.at("dropout").get_to(c.dropout);
  j.at("init_range").get_to(c.init_range);
  j.at("learning_rate").get_to(c.learning_rate);
  j.at("grad_clip").get_to(c.grad_clip);
  j.at("adam_beta1").get_to(c.adam_beta1);
  j.at("adam_beta2").get_to(c.adam_beta2);
  j.at("adam_epsilon").get_to(c.adam_epsilon);
  j.at("epochs").get_to(c.epochs);
  j.at("batch_size").get_to(c.batch_size);
  j.at("seed").get_to(c.seed);
  j.at("vocab_size").get_to(c.vocab_size);
}

// ---------------------------------------------------------------------------
// Parameters.

namespace {

template <typename P, typename Ref, typename Fn>
void VisitTensors(P& p, const Fn& fn) {
  auto mat = [&](std::string_view name, auto& m) {
    fn(Ref{name, m.data(), m.rows(), m.cols()});
  };
  mat("context.w", p.ctx_w);
  mat("context.b", p.ctx_b);
  mat("relation.w", p.rel_w);
  mat("relation.b", p.rel_b);
  mat("embedding.w", p.emb_w);
  mat("embedding.b", p.emb_b);
  mat("gru_fwd.w_in", p.gru_fwd.w_in);
  mat("gru_fwd.u_gates", p.gru_fwd.u_gates);
  mat("gru_fwd.u_cand", p.gru_fwd.u_cand);
  mat("gru_fwd.b", p.gru_fwd.b);
  mat("gru_bwd.w_in", p.gru_bwd.w_in);
  mat("gru_bwd.u_gates", p.gru_bwd.u_gates);
  mat("gru_bwd.u_cand", p.gru_bwd.u_cand);
  mat("gru_bwd.b", p.gru_bwd.b);
  mat("hidden.w", p.hid_w);
  mat("hidden.b", p.hid_b);
  mat("output.w", p.out_w);
  mat("output.b", p.out_b);
}

nn::GruWeights ZeroGru(int hidden, int input) {
  return {Matrix::Zero(3 * hidden, input), Matrix::Zero(2 * hidden, hidden),
          Matrix::Zero(hidden, hidden), Vector::Zero(3 * hidden)};
}

}  // namespace

Parameters Parameters::Zeros(const ModelConfig& config) {
  const int h = config.hidden;
  const bool relations = UsesRelations(config.variant);
  const bool dialogue = UsesDialogue(config.variant);
  Parameters p;
  p.ctx_w = Matrix::Zero(h, kObservationSize + (relations ? h : 0));
  p.ctx_b = Vector::Zero(h);
  if (relations) {
    p.rel_w = Matrix::Zero(h, 8);
    p.rel_b = Vector::Zero(h);
  }
  if (dialogue) {
    p.emb_w = Matrix::Zero(config.embed_dim, config.vocab_size);
    p.emb_b = Vector::Zero(config.embed_dim);
    p.gru_fwd = ZeroGru(h, config.embed_dim);
    p.gru_bwd = ZeroGru(h, config.embed_dim);
  }
  p.hid_w = Matrix::Zero(h, h + (dialogue ? 2 * h : 0));
  p.hid_b = Vector::Zero(h);
  p.out_w = Matrix::Zero(kEntitiesPerView, h);
  p.out_b = Vector::Zero(kEntitiesPerView);
  return p;
}

Parameters Parameters::Init(const ModelConfig& config, Rng& rng) {
  Parameters p = Zeros(config);
  p.ForEach([&](TensorRef t) {
    for (Eigen::Index i = 0; i < t.rows * t.cols; ++i) {
      t.data[i] = rng.Uniform(-config.init_range, config.init_range);
    }
  });
  return p;
}

void Parameters::ForEach(const std::function<void(TensorRef)>& fn) {
  VisitTensors<Parameters, TensorRef>(*this, fn);
}

void Parameters::ForEach(const std::function<void(ConstTensorRef)>& fn) const {
  VisitTensors<const Parameters, ConstTensorRef>(*this, fn);
}

double Parameters::SquaredNorm() const {
  double total = 0;
  ForEach([&](ConstTensorRef t) {
    for (Eigen::Index i = 0; i < t.rows * t.cols; ++i) {
      total += t.data[i] * t.data[i];
    }
  });
  return total;
}

bool Parameters::AllFinite() const {
  bool finite = true;
  ForEach([&](ConstTensorRef t) {
    for (Eigen::Index i = 0; i < t.rows * t.cols; ++i) {
      finite = finite && std::isfinite(t.data[i]);
    }
  });
  return finite;
}

void Parameters::Scale(double factor) {
  ForEach([&](TensorRef t) {
    for (Eigen::Index i = 0; i < t.rows * t.cols; ++i) t.data[i] *= factor;
  });
}

std::size_t Parameters::Count() const {
  std::size_t n = 0;
  ForEach([&](ConstTensorRef t) { n += t.rows * t.cols; });
  return n;
}

bool Parameters::operator==(const Parameters& other) const {
  std::vector<ConstTensorRef> a, b;
  ForEach([&](ConstTensorRef t) { a.push_back(t); });
  other.ForEach([&](ConstTensorRef t) { b.push_back(t); });
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rows != b[i].rows || a[i].cols != b[i].cols) return false;
    if (!std::equal(a[i].data, a[i].data + a[i].rows * a[i].cols, b[i].data)) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Forward and backward passes.

namespace {

struct ContextCache {
  Vector x;
  nn::RelationCache relation;
  nn::DenseCache dense;
};

struct DialogueCache {
  std::vector<int> tokens;
  Matrix pre;
  Matrix mask;
  nn::GruCache fwd;
  nn::GruCache bwd;
  Vector out_mask;
};

struct ExampleCache {
  ContextCache context;
  DialogueCache dialogue;
  nn::DenseCache hidden;
  Vector hidden_out;
};

Vector FlatObservation(const Observation& obs) {
  const auto flat = obs.Flatten();
  return Eigen::Map<const Vector>(flat.data(), flat.size());
}

Matrix ObservationRows(const Observation& obs) {
  Matrix rows(4, kEntitiesPerView);
  for (int i = 0; i < kEntitiesPerView; ++i) {
    rows.col(i) << obs.rows[i].x_rel, obs.rows[i].y_rel, obs.rows[i].size_norm,
        obs.rows[i].color_norm;
  }
  return rows;
}

Vector ContextForward(const Parameters& p, const ModelConfig& config,
                      const Observation& obs, nn::Dropout& dropout,
                      ContextCache* cache) {
  Vector x = FlatObservation(obs);
  Vector in = x;
  if (UsesRelations(config.variant)) {
    const Vector rel =
        nn::RelationSumForward(p.rel_w, p.rel_b, ObservationRows(obs), dropout,
                               cache ? &cache->relation : nullptr);
    in.resize(x.size() + rel.size());
    in << x, rel;
  }
  if (cache) cache->x = x;
  return nn::DenseReluForward(p.ctx_w, p.ctx_b, in, dropout,
                              cache ? &cache->dense : nullptr);
}

void ContextBackward(const Parameters& p, const ModelConfig& config,
                     const ContextCache& cache, const Vector& dout,
                     Parameters& g) {
  const Vector din =
      nn::DenseReluBackward(p.ctx_w, cache.dense, dout, g.ctx_w, g.ctx_b);
  if (UsesRelations(config.variant)) {
    nn::RelationSumBackward(p.rel_w, cache.relation,
                            din.tail(config.hidden), g.rel_w, g.rel_b);
  }
}

Vector DialogueForward(const Parameters& p, const ModelConfig& config,
                       const std::vector<int>& tokens, nn::Dropout& dropout,
                       DialogueCache* cache) {
  if (tokens.empty()) throw std::invalid_argument("empty token stream");
  const auto steps = static_cast<Eigen::Index>(tokens.size());
  Matrix pre(config.embed_dim, steps);
  for (Eigen::Index t = 0; t < steps; ++t) {
    const int id = tokens[t];
    if (id < 0 || id >= p.emb_w.cols()) {
      throw std::out_of_range("token id " + std::to_string(id) +
                              " outside vocabulary");
    }
    pre.col(t) = p.emb_w.col(id) + p.emb_b;
  }
  Matrix mask = dropout.Mask(config.embed_dim, steps);
  const Matrix embedded = pre.cwiseMax(0.0).cwiseProduct(mask);
  const Vector fwd = nn::GruForward(p.gru_fwd, embedded,
                                    cache ? &cache->fwd : nullptr);
  // At the last position the backward direction has read only that token.
  const Vector bwd = nn::GruForward(p.gru_bwd, embedded.rightCols(1),
                                    cache ? &cache->bwd : nullptr);
  Vector out(2 * config.hidden);
  out << fwd, bwd;
  Vector out_mask = dropout.Mask(out.size());
  if (cache) {
    cache->tokens = tokens;
    cache->pre = std::move(pre);
    cache->mask = std::move(mask);
    cache->out_mask = out_mask;
  }
  return out.cwiseProduct(out_mask);
}

void DialogueBackward(const Parameters& p, const ModelConfig& config,
                      const DialogueCache& cache, const Vector& dout,
                      Parameters& g) {
  const Vector d = dout.cwiseProduct(cache.out_mask);
  Matrix dembedded =
      nn::GruBackward(p.gru_fwd, cache.fwd, d.head(config.hidden), g.gru_fwd);
  dembedded.rightCols(1) +=
      nn::GruBackward(p.gru_bwd, cache.bwd, d.tail(config.hidden), g.gru_bwd);
  const Matrix dpre = dembedded.cwiseProduct(cache.mask).cwiseProduct(
      cache.pre.unaryExpr([](double v) { return v > 0 ? 1.0 : 0.0; }));
  for (std::size_t t = 0; t < cache.tokens.size(); ++t) {
    g.emb_w.col(cache.tokens[t]) += dpre.col(t);
  }
  g.emb_b += dpre.rowwise().sum();
}

Vector ExampleForward(const Parameters& p, const ModelConfig& config,
                      const TargetExample& example, Rng* dropout_rng,
                      ExampleCache* cache) {
  nn::Dropout dropout(config.dropout, dropout_rng);
  Vector embedding = ContextForward(p, config, example.observation, dropout,
                                    cache ? &cache->context : nullptr);
  if (UsesDialogue(config.variant)) {
    const Vector dialogue =
        DialogueForward(p, config, example.token_ids, dropout,
                        cache ? &cache->dialogue : nullptr);
    Vector joined(embedding.size() + dialogue.size());
    joined << embedding, dialogue;
    embedding = std::move(joined);
  }
  Vector hidden = nn::DenseReluForward(p.hid_w, p.hid_b, embedding, dropout,
                                       cache ? &cache->hidden : nullptr);
  Vector logits = p.out_w * hidden + p.out_b;
  if (cache) cache->hidden_out = std::move(hidden);
  return logits;
}

}  // namespace

Vector EmbedContextPlain(const Parameters& params, const ModelConfig& config,
                         const Observation& observation, Rng* dropout_rng) {
  nn::Dropout dropout(config.dropout, dropout_rng);
  return nn::DenseReluForward(params.ctx_w.leftCols(kObservationSize),
                              params.ctx_b, FlatObservation(observation),
                              dropout, nullptr);
}

Vector RelationSum(const Parameters& params, const ModelConfig& config,
                   const Observation& observation, Rng* dropout_rng) {
  if (!UsesRelations(config.variant)) {
    throw std::invalid_argument("variant has no relation layer");
  }
  nn::Dropout dropout(config.dropout, dropout_rng);
  return nn::RelationSumForward(params.rel_w, params.rel_b,
                                ObservationRows(observation), dropout, nullptr);
}

Vector EmbedContext(const Parameters& params, const ModelConfig& config,
                    const Observation& observation, Rng* dropout_rng) {
  nn::Dropout dropout(config.dropout, dropout_rng);
  return ContextForward(params, config, observation, dropout, nullptr);
}

Vector EmbedDialogue(const Parameters& params, const ModelConfig& config,
                     const std::vector<int>& token_ids, Rng* dropout_rng) {
  if (!UsesDialogue(config.variant)) {
    throw std::invalid_argument("variant has no dialogue encoder");
  }
  nn::Dropout dropout(config.dropout, dropout_rng);
  return DialogueForward(params, config, token_ids, dropout, nullptr);
}

Vector Predict(const Parameters& params, const ModelConfig& config,
               const TargetExample& example) {
  return ExampleForward(params, config, example, nullptr, nullptr);
}

int PredictSlot(const Parameters& params, const ModelConfig& config,
                const TargetExample& example) {
  Eigen::Index best = 0;
  Predict(params, config, example).maxCoeff(&best);
  return static_cast<int>(best);
}

double LossAndGradient(const Parameters& params, const ModelConfig& config,
                       const TargetExample& example, Rng* dropout_rng,
                       Parameters* grads) {
  if (example.label < 0 || example.label >= kEntitiesPerView) {
    throw std::invalid_argument("label outside [0, 6]");
  }
  ExampleCache cache;
  const Vector logits = ExampleForward(params, config, example, dropout_rng,
                                       grads ? &cache : nullptr);
  Vector dlogits;
  const double loss =
      nn::CrossEntropy(logits, example.label, grads ? &dlogits : nullptr);
  if (!grads) return loss;

  Parameters& g = *grads;
  g.out_w.noalias() += dlogits * cache.hidden_out.transpose();
  g.out_b += dlogits;
  const Vector dhidden = params.out_w.transpose() * dlogits;
  const Vector dembedding =
      nn::DenseReluBackward(params.hid_w, cache.hidden, dhidden, g.hid_w, g.hid_b);
  ContextBackward(params, config, cache.context,
                  dembedding.head(config.hidden), g);
  if (UsesDialogue(config.variant)) {
    DialogueBackward(params, config, cache.dialogue,
                     dembedding.tail(2 * config.hidden), g);
  }
  return loss;
}

GradientCheck CheckGradients(const Parameters& params, const ModelConfig& config,
                             const TargetExample& example, double h,
                             int per_tensor, std::uint64_t seed,
                             std::uint64_t dropout_seed) {
  Parameters grads = Parameters::Zeros(config);
  {
    Rng dropout_rng(dropout_seed);
    LossAndGradient(params, config, example, &dropout_rng, &grads);
  }
  Parameters probe = params;
  std::vector<TensorRef> probe_refs;
  std::vector<ConstTensorRef> grad_refs;
  probe.ForEach([&](TensorRef t) { probe_refs.push_back(t); });
  grads.ForEach([&](ConstTensorRef t) { grad_refs.push_back(t); });
  auto loss = [&] {
    Rng dropout_rng(dropout_seed);
    return LossAndGradient(probe, config, example, &dropout_rng, nullptr);
  };

  Rng pick(seed);
  GradientCheck result;
  for (std::size_t k = 0; k < probe_refs.size(); ++k) {
    const TensorRef& t = probe_refs[k];
    const Eigen::Index n = t.rows * t.cols;
    if (n == 0) continue;
    for (int s = 0; s < per_tensor; ++s) {
      const Eigen::Index i = static_cast<Eigen::Index>(pick.Below(n));
      const double saved = t.data[i];
      t.data[i] = saved + h;
      const double up = loss();
      t.data[i] = saved - h;
      const double down = loss();
      t.data[i] = saved;
      const double numeric = (up - down) / (2 * h);
      const double analytic = grad_refs[k].data[i];
      const double scale = std::max(std::fabs(numeric), std::fabs(analytic));
      double error;
      if (scale < 1e-7) {
        error = std::fabs(numeric - analytic) < 1e-9 ? 0 : 1;
      } else {
        error = std::fabs(numeric - analytic) / scale;
      }
      ++result.checked;
      if (error > result.max_relative_error || result.worst_tensor.empty()) {
        result.max_relative_error = std::max(result.max_relative_error, error);
        result.worst_tensor = std::string(t.name);
      }
    }
  }
  return result;
}

double ClipGlobalNorm(Parameters& grads, double max_norm) {
  const double norm = std::sqrt(grads.SquaredNorm());
  if (norm > max_norm) grads.Scale(max_norm / norm);
  return norm;
}

Adam::Adam(const ModelConfig& config)
    : config_(config),
      m_(Parameters::Zeros(config)),
      v_(Parameters::Zeros(config)) {}

void Adam::Step(Parameters& params, const Parameters& grads) {
  ++step_;
  std::vector<TensorRef> p, m, v;
  std::vector<ConstTensorRef> g;
  params.ForEach([&](TensorRef t) { p.push_back(t); });
  m_.ForEach([&](TensorRef t) { m.push_back(t); });
  v_.ForEach([&](TensorRef t) { v.push_back(t); });
  grads.ForEach([&](ConstTensorRef t) { g.push_back(t); });
  const double b1 = config_.adam_beta1;
  const double b2 = config_.adam_beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Eigen::Index n = p[k].rows * p[k].cols;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double gi = g[k].data[i];
      double& mi = m[k].data[i];
      double& vi = v[k].data[i];
      mi = b1 * mi + (1 - b1) * gi;
      vi = b2 * vi + (1 - b2) * gi * gi;
      const double m_hat = mi / correction1;
      const double v_hat = vi / correction2;
      p[k].data[i] -=
          config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.adam_epsilon);
    }
  }
}

EvalResult Evaluate(const Parameters& params, const ModelConfig& config,
                    const std::vector<TargetExample>& examples) {
  EvalResult result;
  result.correct.reserve(examples.size());
  double loss = 0;
  long hits = 0;
  for (const auto& ex : examples) {
    const Vector logits = Predict(params, config, ex);
    loss += nn::CrossEntropy(logits, ex.label, nullptr);
    Eigen::Index best = 0;
    logits.maxCoeff(&best);
    const int hit = best == ex.label ? 1 : 0;
    hits += hit;
    result.correct.push_back(hit);
  }
  if (!examples.empty()) {
    result.loss = loss / examples.size();
    result.accuracy = static_cast<double>(hits) / examples.size();
  }
  return result;
}

TrainResult Train(const std::vector<TargetExample>& train,
                  const std::vector<TargetExample>& valid,
                  const ModelConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch) {
  config.Validate();
  if (train.empty()) throw std::invalid_argument("empty training set");

  Rng master(config.seed);
  Rng init_rng = master.Fork();
  Rng order_rng = master.Fork();
  Rng dropout_rng = master.Fork();

  Parameters params = Parameters::Init(config, init_rng);
  Parameters grads = Parameters::Zeros(config);
  Adam adam(config);

  TrainResult result;
  result.best_valid_loss = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    order_rng.Shuffle(order);
    double loss_sum = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      grads.Scale(0.0);
      for (std::size_t i = start; i < end; ++i) {
        const double loss = LossAndGradient(params, config, train[order[i]],
                                            &dropout_rng, &grads);
        if (!std::isfinite(loss)) {
          throw TrainingDiverged("non-finite training loss at epoch " +
                                 std::to_string(epoch) + ", example " +
                                 train[order[i]].dialogue_id);
        }
        loss_sum += loss;
      }
      grads.Scale(1.0 / static_cast<double>(end - start));
      ClipGlobalNorm(grads, config.grad_clip);
      adam.Step(params, grads);
      if (!params.AllFinite()) {
        throw TrainingDiverged("non-finite parameters at epoch " +
                               std::to_string(epoch));
      }
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = loss_sum / static_cast<double>(train.size());
    const EvalResult eval = Evaluate(params, config, valid.empty() ? train : valid);
    entry.valid_loss = eval.loss;
    entry.valid_accuracy = eval.accuracy;
    if (!std::isfinite(entry.valid_loss)) {
      throw TrainingDiverged("non-finite validation loss at epoch " +
                             std::to_string(epoch));
    }
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);
    if (entry.valid_loss < result.best_valid_loss) {
      result.best_valid_loss = entry.valid_loss;
      result.best_epoch = epoch;
      result.params = params;
    }
  }
  return result;
}

void SaveModel(const std::filesystem::path& path, const Model& model) {
  json tensors = json::object();
  model.params.ForEach([&](ConstTensorRef t) {
    if (t.rows * t.cols == 0) return;
    tensors[std::string(t.name)] = {
        {"rows", t.rows},
        {"cols", t.cols},
        {"data", std::vector<double>(t.data, t.data + t.rows * t.cols)}};
  });
  const json j = {{"format", "dotref-model-1"},
                  {"config", model.config},
                  {"vocab", model.vocab.tokens()},
                  {"best_epoch", model.best_epoch},
                  {"valid_loss", model.valid_loss},
                  {"tensors", tensors}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump() << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Model LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const json j = json::parse(in);
  if (j.at("format") != "dotref-model-1") {
    throw std::runtime_error(path.string() + ": unsupported model format");
  }
  Model model;
  j.at("config").get_to(model.config);
  model.vocab = Vocabulary::FromTokens(j.at("vocab").get<std::vector<std::string>>());
  j.at("best_epoch").get_to(model.best_epoch);
  j.at("valid_loss").get_to(model.valid_loss);
  model.params = Parameters::Zeros(model.config);
  const auto& tensors = j.at("tensors");
  model.params.ForEach([&](TensorRef t) {
    if (t.rows * t.cols == 0) return;
    const auto& entry = tensors.at(std::string(t.name));
    if (entry.at("rows") != t.rows || entry.at("cols") != t.cols) {
      throw std::runtime_error(path.string() + ": tensor " +
                               std::string(t.name) + " has the wrong shape");
    }
    const auto data = entry.at("data").get<std::vector<double>>();
    std::copy(data.begin(), data.end(), t.data);
  });
  return model;
}

}  // namespace dotref
