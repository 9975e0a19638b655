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

#ifndef DOTREF_CORPUS_H_
#define DOTREF_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dotref/engine.h"
#include "dotref/world.h"
#include "json.hpp"

namespace dotref {

inline constexpr std::string_view kTranscriptFormat = "oc-transcript-1";

// One recorded dialogue. Holds everything needed to replay it through the
// engine: world, session start, first speaker, timing and the event log.
struct Transcript {
  std::string dialogue_id;
  World world;
  int num_shared = 0;
  Millis started_at = 0;
  Millis ended_at = 0;
  Agent first_speaker = 0;
  SessionTiming timing;
  std::vector<Event> events;
  Outcome outcome;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const Transcript&) const = default;
};

void to_json(nlohmann::json& j, const Transcript& t);
void from_json(const nlohmann::json& j, Transcript& t);

// Empty iff num_shared matches the world, the events replay cleanly and the
// replayed outcome at ended_at equals the recorded one.
std::vector<std::string> CheckTranscript(const Transcript& t);

// Utterance texts in order.
std::vector<std::string> Utterances(const Transcript& t);

std::vector<Transcript> ReadTranscripts(const std::filesystem::path& path);
void WriteTranscripts(const std::filesystem::path& path,
                      const std::vector<Transcript>& transcripts);

class Vocabulary {
 public:
  static constexpr int kUnknown = 0;
  static constexpr std::string_view kUnknownToken = "<unk>";
  static constexpr std::string_view kSelfToken = "<you>";
  static constexpr std::string_view kPartnerToken = "<them>";
  static constexpr std::string_view kEndToken = "<end>";
  static constexpr int kDefaultMinCount = 10;

  Vocabulary();

  // Tokens of all utterances in `train` with count >= min_count, most
  // frequent first (ties broken lexicographically), after the reserved
  // tokens.
  static Vocabulary Build(const std::vector<Transcript>& train,
                          int min_count = kDefaultMinCount);
  static Vocabulary FromTokens(std::vector<std::string> tokens);

  int Index(std::string_view token) const;
  const std::string& Token(int index) const { return tokens_.at(index); }
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  int self_index() const { return Index(kSelfToken); }
  int partner_index() const { return Index(kPartnerToken); }
  int end_index() const { return Index(kEndToken); }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

void to_json(nlohmann::json& j, const Vocabulary& v);
void from_json(const nlohmann::json& j, Vocabulary& v);

struct TargetExample {
  std::string dialogue_id;
  Agent agent = 0;
  Observation observation;
  std::vector<int> token_ids;
  int label = 0;  // slot of the agent's selection in id-ascending order
  bool success = false;
  int num_shared = 0;
};

struct ExampleSet {
  std::vector<TargetExample> examples;
  int skipped = 0;  // perspectives without a selection
};

// Token stream for one perspective: each utterance is prefixed with <you>
// or <them>, and the stream ends with <end>.
std::vector<int> EncodeDialogue(const Transcript& t, Agent agent,
                                const Vocabulary& vocab);

ExampleSet MakeExamples(const std::vector<Transcript>& transcripts,
                        const Vocabulary& vocab);

struct Splits {
  std::vector<Transcript> train;
  std::vector<Transcript> valid;
  std::vector<Transcript> test;
};

// Split sizes: valid = test = round(n/10), train = the rest. Assignment is
// by dialogue id and does not depend on input order.
Splits SplitDataset(std::vector<Transcript> transcripts, std::uint64_t seed);

struct TestVariants {
  std::vector<TargetExample> full;
  std::vector<TargetExample> uncorrelated;
  std::vector<TargetExample> success_only;
};

TestVariants MakeTestVariants(const std::vector<TargetExample>& test,
                              std::uint64_t seed);

class ImportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pixel geometry and attribute ranges of the released scenarios. Ranges left
// unset are derived from the data as [min - 0.5, max + 0.5].
struct ImportOptions {
  double view_center_px_x = 215.0;
  double view_center_px_y = 215.0;
  double view_radius_px = 200.0;
  std::optional<std::pair<double, double>> size_range;
  std::optional<std::pair<double, double>> color_range;
  // When false, records that fail transcript checks are skipped and counted
  // instead of failing the import.
  bool strict = true;
};

struct ImportResult {
  std::vector<Transcript> transcripts;
  int skipped = 0;
};

// Reads the released dialogue collection (a JSON array, or JSON lines, of
// chat records with "scenario.kbs", "events" and "outcome"; see
// docs/formats.md) and maps each record onto a Transcript.
ImportResult ImportRelease(const std::filesystem::path& path,
                           const ImportOptions& options = {});
ImportResult ImportReleaseJson(const nlohmann::json& records,
                               const ImportOptions& options = {});

}  // namespace dotref

#endif  // DOTREF_CORPUS_H_
