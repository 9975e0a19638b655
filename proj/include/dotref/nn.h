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

#ifndef DOTREF_NN_H_
#define DOTREF_NN_H_

// Dense, relation and gated-recurrent layers with hand-written backward
// passes. Double precision throughout; every layer is covered by a
// finite-difference gradient test.

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "dotref/random.h"

namespace dotref::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Inverted dropout. Without an Rng (evaluation) every mask is all ones.
class Dropout {
 public:
  Dropout(double rate, Rng* rng) : rate_(rate), rng_(rng) {}
  Vector Mask(Eigen::Index n);
  Matrix Mask(Eigen::Index rows, Eigen::Index cols);
  bool training() const { return rng_ != nullptr; }

 private:
  double rate_;
  Rng* rng_;
};

// y = mask .* relu(W x + b)
struct DenseCache {
  Vector in;
  Vector pre;
  Vector mask;
};

Vector DenseReluForward(const Matrix& w, const Vector& b, const Vector& in,
                        Dropout& dropout, DenseCache* cache);
// Accumulates into dw/db and returns dL/din.
Vector DenseReluBackward(const Matrix& w, const DenseCache& cache,
                         const Vector& dout, Matrix& dw, Vector& db);

inline constexpr int kNumPairs = 21;

// Sum over the 21 unordered slot pairs (i < j) of relu(W [e_i; e_j] + b),
// followed by dropout on the sum. `rows` is 4 x 7 (one column per entity).
struct RelationCache {
  std::array<DenseCache, kNumPairs> pairs;
  Vector mask;
  int pair_evaluations = 0;
};

Vector RelationSumForward(const Matrix& w, const Vector& b, const Matrix& rows,
                          Dropout& dropout, RelationCache* cache);
// Returns dL/drows (4 x 7).
Matrix RelationSumBackward(const Matrix& w, const RelationCache& cache,
                           const Vector& dout, Matrix& dw, Vector& db);

// Gated recurrent unit:
//   z = sigmoid(Wz x + Uz h + bz)
//   r = sigmoid(Wr x + Ur h + br)
//   n = tanh(Wn x + Un (r .* h) + bn)
//   h' = (1 - z) .* n + z .* h
// Input weights are stacked as [Wz; Wr; Wn] (3H x E), recurrent weights as
// [Uz; Ur] (2H x H) and Un (H x H), biases as [bz; br; bn].
struct GruWeights {
  Matrix w_in;
  Matrix u_gates;
  Matrix u_cand;
  Vector b;

  Eigen::Index hidden() const { return u_cand.rows(); }
};

struct GruCache {
  Matrix inputs;  // E x T
  Matrix h;       // H x (T + 1); column 0 is the zero initial state
  Matrix z, r, n; // H x T
};

// Runs over the columns of `inputs` from the zero state; returns the state
// after the last column.
Vector GruForward(const GruWeights& gru, const Matrix& inputs,
                  GruCache* cache);
// Backpropagates dL/dh_T; accumulates weight gradients, returns dL/dinputs.
Matrix GruBackward(const GruWeights& gru, const GruCache& cache,
                   const Vector& dh_last, GruWeights& grads);

// Numerically stable softmax and cross-entropy against `label`.
Vector Softmax(const Vector& logits);
double CrossEntropy(const Vector& logits, int label, Vector* dlogits);

}  // namespace dotref::nn

#endif  // DOTREF_NN_H_
