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

#ifndef DOTREF_MODEL_H_
#define DOTREF_MODEL_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dotref/corpus.h"
#include "dotref/nn.h"
#include "dotref/random.h"
#include "json.hpp"

namespace dotref {

// Target-selection classifiers. Context is encoded by one dense layer over
// the 28 observation values (MLP) or over those values concatenated with a
// relation-network sum (RN). Full variants add a bidirectional GRU dialogue
// encoding. A hidden dense layer and a linear layer produce 7 slot logits.
enum class Variant { kContextMlp, kContextRn, kFullMlp, kFullRn };

inline constexpr std::array<Variant, 4> kAllVariants = {
    Variant::kContextMlp, Variant::kContextRn, Variant::kFullMlp,
    Variant::kFullRn};

std::string_view VariantName(Variant variant);
Variant ParseVariant(std::string_view name);
inline bool UsesRelations(Variant v) {
  return v == Variant::kContextRn || v == Variant::kFullRn;
}
inline bool UsesDialogue(Variant v) {
  return v == Variant::kFullMlp || v == Variant::kFullRn;
}

struct ModelConfig {
  Variant variant = Variant::kFullRn;
  int hidden = 128;
  int embed_dim = 128;
  double dropout = 0.5;
  double init_range = 0.01;
  double learning_rate = 0.001;
  double grad_clip = 0.1;  // global L2 norm
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int epochs = 30;
  int batch_size = 16;
  std::uint64_t seed = 1;
  int vocab_size = 0;  // only used by Full variants

  // Throws std::invalid_argument naming the first bad field.
  void Validate() const;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

struct TensorRef {
  std::string_view name;
  double* data;
  Eigen::Index rows;
  Eigen::Index cols;
};

struct ConstTensorRef {
  std::string_view name;
  const double* data;
  Eigen::Index rows;
  Eigen::Index cols;
};

// All trainable tensors. Tensors a variant does not use are empty.
struct Parameters {
  nn::Matrix ctx_w;  // H x (28 [+ H])
  nn::Vector ctx_b;
  nn::Matrix rel_w;  // H x 8
  nn::Vector rel_b;
  nn::Matrix emb_w;  // E x V
  nn::Vector emb_b;
  nn::GruWeights gru_fwd;
  nn::GruWeights gru_bwd;
  nn::Matrix hid_w;  // H x (H [+ 2H])
  nn::Vector hid_b;
  nn::Matrix out_w;  // 7 x H
  nn::Vector out_b;

  static Parameters Zeros(const ModelConfig& config);
  // Every entry uniform in (-init_range, init_range).
  static Parameters Init(const ModelConfig& config, Rng& rng);

  void ForEach(const std::function<void(TensorRef)>& fn);
  void ForEach(const std::function<void(ConstTensorRef)>& fn) const;

  double SquaredNorm() const;
  bool AllFinite() const;
  void Scale(double factor);
  std::size_t Count() const;

  bool operator==(const Parameters& other) const;
};

// Per-operation entry points. `dropout_rng` == nullptr means evaluation.
nn::Vector EmbedContextPlain(const Parameters& params, const ModelConfig& config,
                             const Observation& observation, Rng* dropout_rng);
nn::Vector RelationSum(const Parameters& params, const ModelConfig& config,
                       const Observation& observation, Rng* dropout_rng);
nn::Vector EmbedContext(const Parameters& params, const ModelConfig& config,
                        const Observation& observation, Rng* dropout_rng);
// 2H vector: [forward state after the last token; backward state at the
// last position]. `token_ids` must be non-empty.
nn::Vector EmbedDialogue(const Parameters& params, const ModelConfig& config,
                         const std::vector<int>& token_ids, Rng* dropout_rng);

// 7 slot logits (evaluation mode).
nn::Vector Predict(const Parameters& params, const ModelConfig& config,
                   const TargetExample& example);
int PredictSlot(const Parameters& params, const ModelConfig& config,
                const TargetExample& example);

// Cross-entropy of one example; accumulates dLoss/dParams into `grads` when
// given (which must be shaped like `params`).
double LossAndGradient(const Parameters& params, const ModelConfig& config,
                       const TargetExample& example, Rng* dropout_rng,
                       Parameters* grads);

struct GradientCheck {
  double max_relative_error = 0;
  std::string worst_tensor;
  long checked = 0;
};

// Compares LossAndGradient against central differences (step h) on up to
// `per_tensor` randomly chosen entries of every tensor. Dropout masks are
// frozen by replaying `dropout_seed` for every evaluation; pass
// config.dropout = 0 for a deterministic network. Entries where both
// gradients are below 1e-7 in magnitude count as agreeing when they differ
// by less than 1e-9.
GradientCheck CheckGradients(const Parameters& params, const ModelConfig& config,
                             const TargetExample& example, double h = 1e-5,
                             int per_tensor = 8, std::uint64_t seed = 1,
                             std::uint64_t dropout_seed = 2);

// Rescales `grads` to norm max_norm if its global L2 norm exceeds it.
// Returns the norm before clipping.
double ClipGlobalNorm(Parameters& grads, double max_norm);

class Adam {
 public:
  Adam(const ModelConfig& config);
  void Step(Parameters& params, const Parameters& grads);
  long steps() const { return step_; }

 private:
  ModelConfig config_;
  Parameters m_;
  Parameters v_;
  long step_ = 0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0;
  double valid_loss = 0;
  double valid_accuracy = 0;
};

struct TrainResult {
  Parameters params;  // checkpoint with the lowest validation loss
  int best_epoch = 0;
  double best_valid_loss = 0;
  std::vector<EpochLog> log;
};

// Mini-batch Adam on mean cross-entropy. Deterministic in (config, data).
// If `valid` is empty the checkpoint is chosen by training loss.
TrainResult Train(const std::vector<TargetExample>& train,
                  const std::vector<TargetExample>& valid,
                  const ModelConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch = {});

struct EvalResult {
  double loss = 0;
  double accuracy = 0;
  std::vector<int> correct;  // 0/1 per example
};

EvalResult Evaluate(const Parameters& params, const ModelConfig& config,
                    const std::vector<TargetExample>& examples);

// A trained model with everything needed to encode new data.
struct Model {
  ModelConfig config;
  Vocabulary vocab;
  Parameters params;
  int best_epoch = 0;
  double valid_loss = 0;
};

// JSON tensor dump, format "dotref-model-1" (see docs/formats.md).
void SaveModel(const std::filesystem::path& path, const Model& model);
Model LoadModel(const std::filesystem::path& path);

}  // namespace dotref

#endif  // DOTREF_MODEL_H_
