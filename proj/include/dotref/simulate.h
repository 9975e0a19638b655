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

#ifndef DOTREF_SIMULATE_H_
#define DOTREF_SIMULATE_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dotref/corpus.h"

namespace dotref {

// Scripted players for synthetic corpora. The speaker describes a shared
// target in words tied to its own observation; the partner answers with its
// best guess, and both select once the lockout has passed.
struct SimulationOptions {
  // Probability that the speaker picks the darkest-and-largest shared dot
  // rather than a uniformly random one.
  double salience = 0.5;
  // Probability that the partner picks the speaker's target.
  double resolve_rate = 0.8;
  // Probability that nobody selects and the session expires.
  double expire_rate = 0.02;
};

// Coarse attribute words for one visible entity, e.g.
// "large dark dot on the left".
std::string DescribeEntity(const World& world, Agent agent, EntityId id);

Transcript SimulateDialogue(const std::string& dialogue_id, int num_shared,
                            std::uint64_t seed,
                            const SimulationOptions& options = {});

// `count` dialogues with k drawn uniformly from {4, 5, 6}. Deterministic in
// (count, seed, options).
std::vector<Transcript> SimulateCorpus(int count, std::uint64_t seed,
                                       const SimulationOptions& options = {});

// Fires `attempts` random actions (messages from either agent, selections
// of random ids including invisible ones) at random non-decreasing times
// between session start and just past the deadline, keeping the accepted
// ones. Rejections are counted per error in `rejected` when given.
GameState RandomPlay(std::shared_ptr<const World> world, std::uint64_t seed,
                     int attempts,
                     std::map<RuleError, int>* rejected = nullptr);

}  // namespace dotref

#endif  // DOTREF_SIMULATE_H_
