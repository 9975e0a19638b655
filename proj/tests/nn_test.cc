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

#include <gtest/gtest.h>

#include <cmath>

#include "dotref/nn.h"
#include "finite_diff.h"

namespace dotref::nn {
namespace {

using dotref::testing::Flat;
using dotref::testing::MaxRelError;
using dotref::testing::NumericGradient;
using dotref::testing::RandomMatrix;
using dotref::testing::RandomVector;

TEST(DropoutTest, EvaluationMaskIsOnes) {
  Dropout eval(0.5, nullptr);
  EXPECT_FALSE(eval.training());
  EXPECT_TRUE(eval.Mask(10).isOnes());
}

TEST(DropoutTest, TrainingMaskIsInvertedAndUnbiased) {
  Rng rng(1);
  Dropout d(0.25, &rng);
  const Vector m = d.Mask(200000);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    ASSERT_TRUE(m(i) == 0.0 || std::abs(m(i) - 1.0 / 0.75) < 1e-12);
  }
  EXPECT_NEAR(m.mean(), 1.0, 0.01);
}

TEST(DenseTest, GradientMatchesFiniteDifferences) {
  Rng rng(3);
  Matrix w = RandomMatrix(6, 5, rng);
  Vector b = RandomVector(6, rng);
  Vector x = RandomVector(5, rng);
  const Vector c = RandomVector(6, rng);
  auto loss = [&] {
    Rng mask_rng(77);
    Dropout d(0.3, &mask_rng);
    return c.dot(DenseReluForward(w, b, x, d, nullptr));
  };
  Rng mask_rng(77);
  Dropout d(0.3, &mask_rng);
  DenseCache cache;
  const Vector y = DenseReluForward(w, b, x, d, &cache);
  EXPECT_NEAR(c.dot(y), loss(), 1e-12);
  Matrix dw = Matrix::Zero(6, 5);
  Vector db = Vector::Zero(6);
  const Vector dx = DenseReluBackward(w, cache, c, dw, db);

  EXPECT_LT(MaxRelError(Flat(dw), NumericGradient(loss, w.data(), w.size())),
            1e-4);
  EXPECT_LT(MaxRelError(db, NumericGradient(loss, b.data(), b.size())), 1e-4);
  EXPECT_LT(MaxRelError(dx, NumericGradient(loss, x.data(), x.size())), 1e-4);
}

TEST(DenseTest, ForwardIsMaskedRelu) {
  Matrix w(2, 2);
  w << 1, -1, 2, 0;
  Vector b(2);
  b << 0.5, -3;
  Vector x(2);
  x << 1, 2;
  Dropout eval(0.5, nullptr);
  const Vector y = DenseReluForward(w, b, x, eval, nullptr);
  EXPECT_DOUBLE_EQ(y(0), 0.0);  // 1 - 2 + 0.5 < 0
  EXPECT_DOUBLE_EQ(y(1), 0.0);  // 2 - 3 < 0
  b << 2, 0;
  const Vector y2 = DenseReluForward(w, b, x, eval, nullptr);
  EXPECT_DOUBLE_EQ(y2(0), 1.0);
  EXPECT_DOUBLE_EQ(y2(1), 2.0);
}

TEST(RelationTest, EvaluatesAllPairsOnce) {
  Rng rng(4);
  const Matrix w = RandomMatrix(5, 8, rng);
  const Vector b = RandomVector(5, rng);
  Dropout eval(0.5, nullptr);
  RelationCache cache;
  Matrix rows(4, 7);
  rows.colwise() = RandomVector(4, rng);  // identical entities
  const Vector sum = RelationSumForward(w, b, rows, eval, &cache);
  EXPECT_EQ(cache.pair_evaluations, 21);
  Vector pair(8);
  pair << rows.col(0), rows.col(0);
  const Vector one = (w * pair + b).cwiseMax(0.0);
  EXPECT_LT((sum - 21.0 * one).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RelationTest, SumMatchesExplicitPairs) {
  Rng rng(5);
  const Matrix w = RandomMatrix(5, 8, rng);
  const Vector b = RandomVector(5, rng);
  const Matrix rows = RandomMatrix(4, 7, rng);
  Dropout eval(0.5, nullptr);
  Vector expected = Vector::Zero(5);
  for (int i = 0; i < 7; ++i) {
    for (int j = i + 1; j < 7; ++j) {
      Vector pair(8);
      pair << rows.col(i), rows.col(j);
      expected += (w * pair + b).cwiseMax(0.0);
    }
  }
  EXPECT_LT((RelationSumForward(w, b, rows, eval, nullptr) - expected)
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(RelationTest, GradientMatchesFiniteDifferences) {
  Rng rng(6);
  Matrix w = RandomMatrix(5, 8, rng);
  Vector b = RandomVector(5, rng);
  Matrix rows = RandomMatrix(4, 7, rng);
  const Vector c = RandomVector(5, rng);
  auto loss = [&] {
    Rng mask_rng(8);
    Dropout d(0.2, &mask_rng);
    return c.dot(RelationSumForward(w, b, rows, d, nullptr));
  };
  Rng mask_rng(8);
  Dropout d(0.2, &mask_rng);
  RelationCache cache;
  RelationSumForward(w, b, rows, d, &cache);
  Matrix dw = Matrix::Zero(5, 8);
  Vector db = Vector::Zero(5);
  const Matrix drows = RelationSumBackward(w, cache, c, dw, db);
  EXPECT_LT(MaxRelError(Flat(dw), NumericGradient(loss, w.data(), w.size())),
            1e-4);
  EXPECT_LT(MaxRelError(db, NumericGradient(loss, b.data(), b.size())), 1e-4);
  EXPECT_LT(MaxRelError(Flat(drows),
                        NumericGradient(loss, rows.data(), rows.size())),
            1e-4);
}

// Direct transcription of the GRU cell, used as the forward oracle.
Vector OracleGru(const GruWeights& g, const Matrix& inputs) {
  const Eigen::Index H = g.hidden();
  Vector h = Vector::Zero(H);
  auto sigmoid = [](const Vector& v) {
    return Vector((1.0 + (-v.array()).exp()).inverse());
  };
  for (Eigen::Index t = 0; t < inputs.cols(); ++t) {
    const Vector x = inputs.col(t);
    const Vector z = sigmoid(g.w_in.topRows(H) * x +
                             g.u_gates.topRows(H) * h + g.b.head(H));
    const Vector r = sigmoid(g.w_in.middleRows(H, H) * x +
                             g.u_gates.bottomRows(H) * h + g.b.segment(H, H));
    const Vector n =
        (g.w_in.bottomRows(H) * x + g.u_cand * r.cwiseProduct(h) + g.b.tail(H))
            .array()
            .tanh()
            .matrix();
    h = (1.0 - z.array()).matrix().cwiseProduct(n) + z.cwiseProduct(h);
  }
  return h;
}

class GruTest : public ::testing::Test {
 protected:
  static constexpr int kE = 4, kHid = 3, kT = 5;
  Rng rng_{9};
  GruWeights gru_{RandomMatrix(3 * kHid, kE, rng_),
                  RandomMatrix(2 * kHid, kHid, rng_),
                  RandomMatrix(kHid, kHid, rng_), RandomVector(3 * kHid, rng_)};
  Matrix inputs_ = RandomMatrix(kE, kT, rng_, 1.0);
  Vector c_ = RandomVector(kHid, rng_);
};

TEST_F(GruTest, ForwardMatchesReferenceCell) {
  GruCache cache;
  const Vector h = GruForward(gru_, inputs_, &cache);
  EXPECT_LT((h - OracleGru(gru_, inputs_)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(cache.h.cols(), kT + 1);
  EXPECT_TRUE(cache.h.col(0).isZero());
  EXPECT_TRUE(GruForward(gru_, Matrix(kE, 0), nullptr).isZero());
}

TEST_F(GruTest, GradientMatchesFiniteDifferences) {
  auto loss = [&] { return c_.dot(OracleGru(gru_, inputs_)); };
  GruCache cache;
  GruForward(gru_, inputs_, &cache);
  GruWeights grads{Matrix::Zero(3 * kHid, kE), Matrix::Zero(2 * kHid, kHid),
                   Matrix::Zero(kHid, kHid), Vector::Zero(3 * kHid)};
  const Matrix dinputs = GruBackward(gru_, cache, c_, grads);
  EXPECT_LT(MaxRelError(Flat(grads.w_in),
                        NumericGradient(loss, gru_.w_in.data(),
                                        gru_.w_in.size())),
            1e-3);
  EXPECT_LT(MaxRelError(Flat(grads.u_gates),
                        NumericGradient(loss, gru_.u_gates.data(),
                                        gru_.u_gates.size())),
            1e-3);
  EXPECT_LT(MaxRelError(Flat(grads.u_cand),
                        NumericGradient(loss, gru_.u_cand.data(),
                                        gru_.u_cand.size())),
            1e-3);
  EXPECT_LT(MaxRelError(grads.b, NumericGradient(loss, gru_.b.data(),
                                                 gru_.b.size())),
            1e-3);
  EXPECT_LT(MaxRelError(Flat(dinputs),
                        NumericGradient(loss, inputs_.data(), inputs_.size())),
            1e-3);
}

TEST(SoftmaxTest, SumsToOneAndIsStable) {
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector logits = RandomVector(7, rng, 50.0);
    const Vector p = Softmax(logits);
    EXPECT_NEAR(p.sum(), 1.0, 1e-9);
    EXPECT_TRUE(p.allFinite());
  }
  Vector huge(3);
  huge << 1000, 1000, -1000;
  const Vector p = Softmax(huge);
  EXPECT_NEAR(p(0), 0.5, 1e-12);
  EXPECT_NEAR(p(2), 0.0, 1e-12);
}

TEST(CrossEntropyTest, UniformLogitsGiveLogSeven) {
  Vector d;
  EXPECT_NEAR(CrossEntropy(Vector::Zero(7), 3, &d), std::log(7.0), 1e-12);
  for (int i = 0; i < 7; ++i) {
    EXPECT_NEAR(d(i), i == 3 ? 1.0 / 7 - 1 : 1.0 / 7, 1e-12);
  }
}

TEST(CrossEntropyTest, GradientMatchesFiniteDifferences) {
  Rng rng(12);
  Vector logits = RandomVector(7, rng, 3.0);
  Vector d;
  CrossEntropy(logits, 5, &d);
  auto loss = [&] { return CrossEntropy(logits, 5, nullptr); };
  EXPECT_LT(MaxRelError(d, NumericGradient(loss, logits.data(), 7)), 1e-6);
}

}  // namespace
}  // namespace dotref::nn
