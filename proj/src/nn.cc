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

#include "dotref/nn.h"

#include <cmath>
#include <stdexcept>

namespace dotref::nn {

namespace {

Vector Sigmoid(const Vector& x) {
  return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

}  // namespace

Vector Dropout::Mask(Eigen::Index n) {
  Vector mask = Vector::Ones(n);
  if (!rng_ || rate_ <= 0) return mask;
  const double keep_scale = 1.0 / (1.0 - rate_);
  for (Eigen::Index i = 0; i < n; ++i) {
    mask[i] = rng_->Uniform01() < rate_ ? 0.0 : keep_scale;
  }
  return mask;
}

Matrix Dropout::Mask(Eigen::Index rows, Eigen::Index cols) {
  Matrix mask(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) mask.col(c) = Mask(rows);
  return mask;
}

Vector DenseReluForward(const Matrix& w, const Vector& b, const Vector& in,
                        Dropout& dropout, DenseCache* cache) {
  Vector pre = w * in + b;
  Vector mask = dropout.Mask(pre.size());
  Vector out = pre.cwiseMax(0.0).cwiseProduct(mask);
  if (cache) {
    cache->in = in;
    cache->pre = std::move(pre);
    cache->mask = std::move(mask);
  }
  return out;
}

Vector DenseReluBackward(const Matrix& w, const DenseCache& cache,
                         const Vector& dout, Matrix& dw, Vector& db) {
  const Vector dpre =
      dout.cwiseProduct(cache.mask)
          .cwiseProduct(cache.pre.unaryExpr(
              [](double v) { return v > 0 ? 1.0 : 0.0; }));
  dw.noalias() += dpre * cache.in.transpose();
  db += dpre;
  return w.transpose() * dpre;
}

Vector RelationSumForward(const Matrix& w, const Vector& b, const Matrix& rows,
                          Dropout& dropout, RelationCache* cache) {
  const Eigen::Index features = rows.rows();
  const Eigen::Index entities = rows.cols();
  if (entities * (entities - 1) / 2 != kNumPairs) {
    throw std::invalid_argument("relation layer expects 7 entities");
  }
  Vector sum = Vector::Zero(w.rows());
  Dropout no_dropout(0.0, nullptr);
  Vector pair(2 * features);
  int p = 0;
  for (Eigen::Index i = 0; i < entities; ++i) {
    for (Eigen::Index j = i + 1; j < entities; ++j, ++p) {
      pair << rows.col(i), rows.col(j);
      sum += DenseReluForward(w, b, pair, no_dropout,
                              cache ? &cache->pairs[p] : nullptr);
    }
  }
  Vector mask = dropout.Mask(sum.size());
  if (cache) {
    cache->mask = mask;
    cache->pair_evaluations = p;
  }
  return sum.cwiseProduct(mask);
}

Matrix RelationSumBackward(const Matrix& w, const RelationCache& cache,
                           const Vector& dout, Matrix& dw, Vector& db) {
  const Eigen::Index features = w.cols() / 2;
  constexpr int kEntities = 7;
  Matrix drows = Matrix::Zero(features, kEntities);
  const Vector dsum = dout.cwiseProduct(cache.mask);
  int p = 0;
  for (int i = 0; i < kEntities; ++i) {
    for (int j = i + 1; j < kEntities; ++j, ++p) {
      const Vector dpair = DenseReluBackward(w, cache.pairs[p], dsum, dw, db);
      drows.col(i) += dpair.head(features);
      drows.col(j) += dpair.tail(features);
    }
  }
  return drows;
}

Vector GruForward(const GruWeights& gru, const Matrix& inputs,
                  GruCache* cache) {
  const Eigen::Index hidden = gru.hidden();
  const Eigen::Index steps = inputs.cols();
  const Matrix projected = (gru.w_in * inputs).colwise() + gru.b;
  Matrix h = Matrix::Zero(hidden, steps + 1);
  Matrix z(hidden, steps), r(hidden, steps), n(hidden, steps);
  for (Eigen::Index t = 0; t < steps; ++t) {
    const auto h_prev = h.col(t);
    const Vector gates = projected.col(t).head(2 * hidden) +
                         gru.u_gates * h_prev;
    z.col(t) = Sigmoid(gates.head(hidden));
    r.col(t) = Sigmoid(gates.tail(hidden));
    const Vector reset_h = r.col(t).cwiseProduct(h_prev);
    n.col(t) = (projected.col(t).tail(hidden) + gru.u_cand * reset_h)
                   .array()
                   .tanh()
                   .matrix();
    h.col(t + 1) = (1.0 - z.col(t).array()) * n.col(t).array() +
                   z.col(t).array() * h_prev.array();
  }
  Vector last = h.col(steps);
  if (cache) {
    cache->inputs = inputs;
    cache->h = std::move(h);
    cache->z = std::move(z);
    cache->r = std::move(r);
    cache->n = std::move(n);
  }
  return last;
}

Matrix GruBackward(const GruWeights& gru, const GruCache& cache,
                   const Vector& dh_last, GruWeights& grads) {
  const Eigen::Index hidden = gru.hidden();
  const Eigen::Index steps = cache.inputs.cols();
  Matrix dprojected(3 * hidden, steps);
  // Recurrent weight gradients are gathered per step and applied as two
  // matrix products after the loop.
  Matrix reset_hs(hidden, steps);
  Vector dh = dh_last;
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const auto h_prev = cache.h.col(t).array();
    const auto z = cache.z.col(t).array();
    const auto r = cache.r.col(t).array();
    const auto n = cache.n.col(t).array();

    const Vector dn = (dh.array() * (1.0 - z)).matrix();
    const Vector dz = (dh.array() * (h_prev - n)).matrix();
    Vector dh_prev = (dh.array() * z).matrix();

    const Vector da_n = (dn.array() * (1.0 - n * n)).matrix();
    reset_hs.col(t) = (r * h_prev).matrix();
    const Vector dreset_h = gru.u_cand.transpose() * da_n;
    const Vector dr = (dreset_h.array() * h_prev).matrix();
    dh_prev += (dreset_h.array() * r).matrix();

    dprojected.col(t).head(hidden) = (dz.array() * z * (1.0 - z)).matrix();
    dprojected.col(t).segment(hidden, hidden) =
        (dr.array() * r * (1.0 - r)).matrix();
    dprojected.col(t).tail(hidden) = da_n;
    dh_prev.noalias() +=
        gru.u_gates.transpose() * dprojected.col(t).head(2 * hidden);
    dh = std::move(dh_prev);
  }
  grads.u_cand.noalias() += dprojected.bottomRows(hidden) * reset_hs.transpose();
  grads.u_gates.noalias() += dprojected.topRows(2 * hidden) *
                             cache.h.leftCols(steps).transpose();
  grads.w_in.noalias() += dprojected * cache.inputs.transpose();
  grads.b += dprojected.rowwise().sum();
  return gru.w_in.transpose() * dprojected;
}

Vector Softmax(const Vector& logits) {
  const double max = logits.maxCoeff();
  Vector e = (logits.array() - max).exp().matrix();
  return e / e.sum();
}

double CrossEntropy(const Vector& logits, int label, Vector* dlogits) {
  const double max = logits.maxCoeff();
  const double log_sum = max + std::log((logits.array() - max).exp().sum());
  if (dlogits) {
    *dlogits = (logits.array() - log_sum).exp().matrix();
    (*dlogits)[label] -= 1.0;
  }
  return log_sum - logits[label];
}

}  // namespace dotref::nn
