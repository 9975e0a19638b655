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

// Acceptance run: prints one PASS/FAIL/SKIP line per criterion and exits
// non-zero if any criterion fails. Criteria that need the released dialogue
// collection run only when DOTREF_RELEASE names it.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include <boost/asio/executor_work_guard.hpp>
#include <boost/asio/io_context.hpp>

#include "dotref/analysis.h"
#include "dotref/corpus.h"
#include "dotref/engine.h"
#include "dotref/evaluation.h"
#include "dotref/model.h"
#include "dotref/server/bot.h"
#include "dotref/server/hub.h"
#include "dotref/server/websocket.h"
#include "dotref/simulate.h"
#include "dotref/stats.h"
#include "dotref/world.h"
#include "finite_diff.h"

namespace dotref {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

enum class Verdict { kPass, kFail, kSkip };

struct Result {
  Verdict verdict = Verdict::kFail;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fixed(double v, int digits = 2) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

std::string Pct(double v) { return Fixed(100 * v) + "%"; }

// Collects failed sub-checks of one criterion.
class Checks {
 public:
  void Expect(bool ok, const std::string& what) {
    if (!ok) failed_.push_back(what);
  }
  Result Finish(const std::string& summary) const {
    if (failed_.empty()) return {Verdict::kPass, summary};
    std::string detail = summary + "; failed: ";
    for (std::size_t i = 0; i < failed_.size() && i < 5; ++i) {
      detail += (i ? "; " : "") + failed_[i];
    }
    if (failed_.size() > 5) {
      detail += " (+" + std::to_string(failed_.size() - 5) + " more)";
    }
    return {Verdict::kFail, detail};
  }

 private:
  std::vector<std::string> failed_;
};

// ---------------------------------------------------------------------------

Result WorldGeneration() {
  constexpr int kPerK = 10'000;
  const auto start = Clock::now();
  Checks checks;
  long invalid = 0;
  std::vector<long> size_bins(10, 0), color_bins(10, 0);
  auto bin = [](double v, double lo, double hi) {
    return std::min(9, static_cast<int>((v - lo) / (hi - lo) * 10));
  };
  for (int k = 4; k <= 6; ++k) {
    for (int i = 0; i < kPerK; ++i) {
      const World w = GenerateWorld(k, 900'000 + i);
      if (!ValidateWorld(w).empty()) ++invalid;
      for (const Entity& e : w.entities) {
        ++size_bins[bin(e.size, kSizeMin, kSizeMax)];
        ++color_bins[bin(e.color, kColorMin, kColorMax)];
      }
    }
  }
  const double seconds = Seconds(start);
  const double p_size = ChiSquareUniformP(size_bins);
  const double p_color = ChiSquareUniformP(color_bins);
  checks.Expect(invalid == 0, std::to_string(invalid) + " invalid worlds");
  checks.Expect(seconds < 60, "runtime " + Fixed(seconds) + " s");
  checks.Expect(p_size > 1e-3, "size uniformity p = " + Fixed(p_size, 4));
  checks.Expect(p_color > 1e-3, "color uniformity p = " + Fixed(p_color, 4));
  return checks.Finish(std::to_string(3 * kPerK) + " worlds valid in " +
                       Fixed(seconds) + " s; chi-square p(size) = " +
                       Fixed(p_size, 4) + ", p(color) = " + Fixed(p_color, 4));
}

Result EngineRules() {
  Checks checks;
  auto world = std::make_shared<const World>(GenerateWorld(5, 4242));
  constexpr Millis kStart = 1'000'000;
  const GameState s = NewSession(world, kStart, 0);
  const EntityId dot = world->SharedIds().front();
  const Millis active = s.active_start();

  for (Millis at : {active + 59'000, active + 59'999}) {
    auto r = s.Apply(0, Select{dot}, at);
    checks.Expect(!r && r.error() == RuleError::kTooEarlyToSelect,
                  "select at " + std::to_string(at - active) + " ms accepted");
  }
  checks.Expect(s.Apply(0, Select{dot}, active + 60'000).has_value(),
                "select at 60 s rejected");

  auto first = s.Apply(0, Message{"hi"}, active + 1);
  checks.Expect(first.has_value(), "first message rejected");
  if (first) {
    auto again = first->Apply(0, Message{"again"}, active + 2);
    checks.Expect(!again && again.error() == RuleError::kNotYourTurn,
                  "same speaker twice accepted");
    checks.Expect(first->Apply(1, Message{"yo"}, active + 2).has_value(),
                  "partner reply rejected");
  }
  auto out_of_turn = s.Apply(1, Message{"me"}, active + 1);
  checks.Expect(!out_of_turn && out_of_turn.error() == RuleError::kNotYourTurn,
                "second speaker opened the chat");

  constexpr int kLogs = 1000;
  int mismatches = 0;
  std::size_t events = 0;
  std::map<RuleError, int> rejected;
  for (int i = 0; i < kLogs; ++i) {
    auto w = std::make_shared<const World>(GenerateWorld(4 + i % 3, 7000 + i));
    const GameState played = RandomPlay(w, 31 * i + 5, 60, &rejected);
    events += played.events().size();
    const auto replayed = Replay(w, played.started_at(), played.first_speaker(),
                                 played.events(), played.timing());
    if (!replayed || !(replayed.value() == played)) ++mismatches;
  }
  checks.Expect(mismatches == 0, std::to_string(mismatches) +
                                     " replay mismatches");
  std::ostringstream summary;
  summary << "lockout 59 s/59.999 s rejected, 60 s accepted; alternation "
             "enforced; "
          << kLogs << " random logs (" << events << " events, "
          << rejected.size() << " rule-error kinds exercised) replay "
          << "identically";
  return checks.Finish(summary.str());
}

struct TestSet {
  std::string source;
  Vocabulary vocab;
  TestVariants variants;
};

std::optional<fs::path> ReleasePath() {
  const char* env = std::getenv("DOTREF_RELEASE");
  if (!env || !*env) return std::nullopt;
  return fs::path(env);
}

ImportResult ImportedRelease() {
  static const ImportResult result = [] {
    ImportOptions options;
    options.strict = false;
    return ImportRelease(*ReleasePath(), options);
  }();
  return result;
}

Result RandomBaseline() {
  TestSet set;
  std::vector<Transcript> test;
  if (ReleasePath()) {
    const Splits splits = SplitDataset(ImportedRelease().transcripts, 1);
    set.source = "release test split";
    set.vocab = Vocabulary::Build(splits.train);
    test = splits.test;
  } else {
    // Without the release, a large synthetic test set stands in.
    test = SimulateCorpus(10'000, 2026);
    set.source = "synthetic test set";
    set.vocab = Vocabulary::Build(test);
  }
  set.variants = MakeTestVariants(MakeExamples(test, set.vocab).examples, 1);

  ModelConfig config;  // FullRN with the default sizes, untrained
  config.vocab_size = set.vocab.size();
  Rng rng(config.seed);
  const Parameters untrained = Parameters::Init(config, rng);

  Checks checks;
  std::ostringstream summary;
  summary << set.source;
  const char* sep = ": ";
  const std::vector<std::pair<std::string, const std::vector<TargetExample>*>>
      variants = {{"full", &set.variants.full},
                  {"uncorrelated", &set.variants.uncorrelated},
                  {"success-only", &set.variants.success_only}};
  for (const auto& [name, examples] : variants) {
    const double uniform = UniformRandomAccuracy(*examples, 7);
    const double model = Evaluate(untrained, config, *examples).accuracy;
    summary << sep << name << " (n=" << examples->size() << ") uniform "
            << Pct(uniform) << ", untrained FullRN " << Pct(model);
    sep = "; ";
    for (const auto& [label, acc] :
         {std::pair{"uniform", uniform}, std::pair{"untrained", model}}) {
      checks.Expect(std::abs(100 * acc - 100.0 / 7) <= 1.5,
                    std::string(label) + " " + name + " " + Pct(acc));
    }
  }
  return checks.Finish(summary.str());
}

Result GradientSuite() {
  using namespace dotref::testing;
  const auto start = Clock::now();
  Checks checks;
  std::ostringstream summary;
  Rng rng(17);

  // Layers, against an oracle that never sees their backward code.
  {
    nn::Matrix w = RandomMatrix(16, 28, rng);
    nn::Vector b = RandomVector(16, rng);
    nn::Vector x = RandomVector(28, rng);
    const nn::Vector c = RandomVector(16, rng);
    auto loss = [&] {
      Rng masks(3);
      nn::Dropout d(0.5, &masks);
      return c.dot(nn::DenseReluForward(w, b, x, d, nullptr));
    };
    Rng masks(3);
    nn::Dropout d(0.5, &masks);
    nn::DenseCache cache;
    nn::DenseReluForward(w, b, x, d, &cache);
    nn::Matrix dw = nn::Matrix::Zero(16, 28);
    nn::Vector db = nn::Vector::Zero(16);
    const nn::Vector dx = nn::DenseReluBackward(w, cache, c, dw, db);
    const double err = std::max(
        {MaxRelError(Flat(dw), NumericGradient(loss, w.data(), w.size())),
         MaxRelError(db, NumericGradient(loss, b.data(), b.size())),
         MaxRelError(dx, NumericGradient(loss, x.data(), x.size()))});
    checks.Expect(err < 1e-4, "context dense " + std::to_string(err));
    summary << "dense " << err;
  }
  {
    nn::Matrix w = RandomMatrix(16, 8, rng);
    nn::Vector b = RandomVector(16, rng);
    nn::Matrix rows = RandomMatrix(4, 7, rng);
    const nn::Vector c = RandomVector(16, rng);
    auto loss = [&] {
      Rng masks(4);
      nn::Dropout d(0.5, &masks);
      return c.dot(nn::RelationSumForward(w, b, rows, d, nullptr));
    };
    Rng masks(4);
    nn::Dropout d(0.5, &masks);
    nn::RelationCache cache;
    nn::RelationSumForward(w, b, rows, d, &cache);
    nn::Matrix dw = nn::Matrix::Zero(16, 8);
    nn::Vector db = nn::Vector::Zero(16);
    const nn::Matrix drows = nn::RelationSumBackward(w, cache, c, dw, db);
    const double err = std::max(
        {MaxRelError(Flat(dw), NumericGradient(loss, w.data(), w.size())),
         MaxRelError(db, NumericGradient(loss, b.data(), b.size())),
         MaxRelError(Flat(drows),
                     NumericGradient(loss, rows.data(), rows.size()))});
    checks.Expect(err < 1e-4, "relation " + std::to_string(err));
    summary << ", relation " << err;
  }
  {
    constexpr int kE = 12, kH = 10, kT = 25;
    nn::GruWeights gru{RandomMatrix(3 * kH, kE, rng),
                       RandomMatrix(2 * kH, kH, rng),
                       RandomMatrix(kH, kH, rng), RandomVector(3 * kH, rng)};
    nn::Matrix inputs = RandomMatrix(kE, kT, rng, 1.0);
    const nn::Vector c = RandomVector(kH, rng);
    auto loss = [&] { return c.dot(nn::GruForward(gru, inputs, nullptr)); };
    nn::GruCache cache;
    nn::GruForward(gru, inputs, &cache);
    nn::GruWeights g{nn::Matrix::Zero(3 * kH, kE), nn::Matrix::Zero(2 * kH, kH),
                     nn::Matrix::Zero(kH, kH), nn::Vector::Zero(3 * kH)};
    const nn::Matrix dinputs = nn::GruBackward(gru, cache, c, g);
    const double err = std::max(
        {MaxRelError(Flat(g.w_in),
                     NumericGradient(loss, gru.w_in.data(), gru.w_in.size())),
         MaxRelError(Flat(g.u_gates), NumericGradient(loss, gru.u_gates.data(),
                                                      gru.u_gates.size())),
         MaxRelError(Flat(g.u_cand), NumericGradient(loss, gru.u_cand.data(),
                                                     gru.u_cand.size())),
         MaxRelError(g.b, NumericGradient(loss, gru.b.data(), gru.b.size())),
         MaxRelError(Flat(dinputs),
                     NumericGradient(loss, inputs.data(), inputs.size()))});
    checks.Expect(err < 1e-3, "gru " + std::to_string(err));
    summary << ", gru " << err;
  }

  // Full losses on real encoded dialogues, dropout masks frozen.
  const auto corpus = SimulateCorpus(10, 5);
  const Vocabulary vocab = Vocabulary::Build(corpus, 1);
  const auto examples = MakeExamples(corpus, vocab).examples;
  for (Variant v : kAllVariants) {
    ModelConfig config;
    config.variant = v;
    config.hidden = 16;
    config.embed_dim = 16;
    config.init_range = 0.3;
    config.vocab_size = vocab.size();
    Rng init(static_cast<std::uint64_t>(v) + 1);
    const Parameters params = Parameters::Init(config, init);
    double worst = 0;
    long checked = 0;
    for (std::size_t i = 0; i < 5; ++i) {
      const auto r = CheckGradients(params, config, examples.at(i), 1e-5, 40,
                                    i + 1, i + 100);
      worst = std::max(worst, r.max_relative_error);
      checked += r.checked;
    }
    const double limit = UsesDialogue(v) ? 1e-3 : 1e-4;
    checks.Expect(worst < limit,
                  std::string(VariantName(v)) + " " + std::to_string(worst));
    summary << ", " << VariantName(v) << " " << worst << " (" << checked
            << " entries)";
  }
  const double seconds = Seconds(start);
  checks.Expect(seconds < 300, "runtime " + Fixed(seconds) + " s");
  summary << "; max relative errors, " << Fixed(seconds) << " s";
  return checks.Finish(summary.str());
}

Result OverfitSanity() {
  const auto corpus = SimulateCorpus(40, 50);
  const Vocabulary vocab = Vocabulary::Build(corpus, 1);
  auto examples = MakeExamples(corpus, vocab).examples;
  if (examples.size() < 50) return {Verdict::kFail, "fixture too small"};
  examples.resize(50);

  ModelConfig config;  // FullRN, default sizes and dropout
  config.vocab_size = vocab.size();
  config.epochs = 500;
  const auto start = Clock::now();
  int first_perfect = 0;
  double best_accuracy = 0;
  // Validating on the training examples reports train accuracy (eval mode).
  Train(examples, examples, config, [&](const EpochLog& e) {
    best_accuracy = std::max(best_accuracy, e.valid_accuracy);
    if (first_perfect == 0 && e.valid_accuracy == 1.0) first_perfect = e.epoch;
  });
  const double seconds = Seconds(start);
  Checks checks;
  checks.Expect(first_perfect > 0,
                "best train accuracy " + Pct(best_accuracy));
  checks.Expect(seconds < 600, "runtime " + Fixed(seconds) + " s");
  return checks.Finish(
      "FullRN on 50 examples: 100% train accuracy first at epoch " +
      std::to_string(first_perfect) + " of 500; " + Fixed(seconds) + " s");
}

// ---------------------------------------------------------------------------
// Released-data criteria.

Result ImportCounts() {
  const ImportResult r = ImportedRelease();
  std::map<int, int> by_k;
  for (const auto& t : r.transcripts) ++by_k[t.num_shared];
  Checks checks;
  checks.Expect(r.transcripts.size() == 6760,
                std::to_string(r.transcripts.size()) + " dialogues");
  const std::map<int, int> expected = {{4, 2189}, {5, 2279}, {6, 2292}};
  for (const auto& [k, n] : expected) {
    checks.Expect(by_k[k] == n,
                  "k=" + std::to_string(k) + ": " + std::to_string(by_k[k]));
  }
  return checks.Finish(std::to_string(r.transcripts.size()) + " dialogues (" +
                       std::to_string(by_k[4]) + "/" + std::to_string(by_k[5]) +
                       "/" + std::to_string(by_k[6]) + "), " +
                       std::to_string(r.skipped) + " skipped");
}

Result CorpusAnalysis() {
  const auto& transcripts = ImportedRelease().transcripts;
  const CorpusStats stats = BasicStats(transcripts);
  const SelectionBias bias = ComputeSelectionBias(transcripts);
  const auto categories =
      LoadNuanceDictionaries(fs::path(DOTREF_DATA_DIR) / "nuance");
  const NuanceRates nuance = NuanceCounts(transcripts, categories);
  Checks checks;
  std::ostringstream summary;
  const std::map<int, std::pair<double, double>> per_k = {
      {4, {0.66, 4.97}}, {5, {0.77, 4.77}}, {6, {0.87, 4.56}}};
  for (const auto& [k, target] : per_k) {
    const GroupStats g =
        stats.by_shared.count(k) ? stats.by_shared.at(k) : GroupStats{};
    checks.Expect(std::abs(g.SuccessRate() - target.first) <= 0.005,
                  "success k=" + std::to_string(k) + " " +
                      Fixed(g.SuccessRate(), 3));
    checks.Expect(std::abs(g.AvgTurnsPerDialogue() - target.second) <= 0.05,
                  "turns k=" + std::to_string(k) + " " +
                      Fixed(g.AvgTurnsPerDialogue()));
    summary << "k=" << k << " success " << Fixed(g.SuccessRate(), 3)
            << " turns " << Fixed(g.AvgTurnsPerDialogue()) << "; ";
  }
  checks.Expect(std::abs(stats.unique_tokens - 3761.0) <= 0.02 * 3761,
                "unique tokens " + std::to_string(stats.unique_tokens));
  checks.Expect(std::abs(stats.top_decile_occupancy - 0.970) <= 0.005,
                "top decile " + Pct(stats.top_decile_occupancy));
  checks.Expect(std::abs(bias.DarkerShare() - 0.627) <= 0.01,
                "darker " + Pct(bias.DarkerShare()));
  checks.Expect(std::abs(bias.LargerShare() - 0.543) <= 0.01,
                "larger " + Pct(bias.LargerShare()));
  summary << "unique tokens " << stats.unique_tokens << ", top decile "
          << Pct(stats.top_decile_occupancy) << ", darker "
          << Pct(bias.DarkerShare()) << ", larger " << Pct(bias.LargerShare());
  const std::map<std::string, double> table = {
      {"Approximation", 3.98}, {"Exactness/Confidence", 2.71},
      {"Subtlety", 9.37},      {"Extremity", 9.35},
      {"Uncertainty", 5.79}};
  for (const auto& [name, target] : table) {
    const double rate = nuance.per_100_utterances.count(name)
                            ? nuance.per_100_utterances.at(name)
                            : 0.0;
    checks.Expect(std::abs(rate - target) <= 0.15 * target,
                  name + " " + Fixed(rate));
    summary << ", " << name << " " << Fixed(rate);
  }
  return checks.Finish(summary.str());
}

Result Baselines() {
  const Splits splits = SplitDataset(ImportedRelease().transcripts, 1);
  const Vocabulary vocab = Vocabulary::Build(splits.train);
  const auto train = MakeExamples(splits.train, vocab).examples;
  const auto valid = MakeExamples(splits.valid, vocab).examples;
  Checks checks;
  std::vector<Model> models;
  double slowest = 0;
  for (Variant v : kAllVariants) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      ModelConfig config;
      config.variant = v;
      config.seed = seed;
      config.vocab_size = vocab.size();
      const auto start = Clock::now();
      const TrainResult r = Train(train, valid, config);
      const double seconds = Seconds(start);
      slowest = std::max(slowest, seconds);
      checks.Expect(seconds < 1800, std::string(VariantName(v)) + " seed " +
                                        std::to_string(seed) + " took " +
                                        Fixed(seconds) + " s");
      models.push_back({config, vocab, r.params, r.best_epoch,
                        r.best_valid_loss});
    }
  }
  const EvalReport report = EvaluateModels(models, splits.test, 1);
  const std::map<Variant, double> targets = {{Variant::kContextMlp, 27.9},
                                             {Variant::kContextRn, 31.9},
                                             {Variant::kFullMlp, 40.3},
                                             {Variant::kFullRn, 43.1}};
  std::ostringstream summary;
  double previous = -1;
  for (Variant v : kAllVariants) {
    const VariantReport* row = report.Find(v);
    const double mean = row ? 100 * row->full_mean : 0;
    checks.Expect(std::abs(mean - targets.at(v)) <= 3,
                  std::string(VariantName(v)) + " " + Fixed(mean));
    checks.Expect(mean > previous,
                  std::string(VariantName(v)) + " breaks the ordering");
    previous = mean;
    summary << VariantName(v) << " " << Fixed(mean) << " ";
  }
  double p = 1;
  for (const auto& c : report.comparisons) {
    if (c.a == Variant::kContextRn && c.b == Variant::kFullRn) p = c.test.p;
  }
  checks.Expect(p < 1e-6, "FullRN vs ContextRN p = " + std::to_string(p));
  const VariantReport* full_rn = report.Find(Variant::kFullRn);
  const double success_only = full_rn ? full_rn->success_only_accuracy : 0;
  checks.Expect(success_only >= 0.46, "success-only FullRN " +
                                          Pct(success_only));
  summary << "(seed means, full testset); FullRN vs ContextRN p = " << p
          << "; success-only FullRN " << Pct(success_only)
          << "; slowest run " << Fixed(slowest) << " s";
  return checks.Finish(summary.str());
}

// ---------------------------------------------------------------------------

Result ServerSessions() {
  using namespace dotref::server;
  constexpr int kSessions = 100;
  constexpr double kScale = 100;
  const fs::path dir = fs::temp_directory_path() / "dotref_acceptance_store";
  fs::remove_all(dir);

  std::vector<BotLog> logs(2 * kSessions);
  long finished = 0;
  {
    boost::asio::io_context io;
    auto guard = boost::asio::make_work_guard(io);
    SteadyClock clock(kScale);
    TranscriptStore store(dir);
    HubOptions options;
    options.seed = 11;
    options.tick_interval = std::chrono::milliseconds(
        static_cast<long>(1000 / kScale));
    Hub hub(io, clock, store, options);
    WebSocketServer ws(io, hub,
                       {boost::asio::ip::make_address("127.0.0.1"), 0});
    ws.Start();
    std::thread loop([&] { io.run(); });

    std::vector<std::future<BotLog>> bots;
    for (int i = 0; i < 2 * kSessions; ++i) {
      BotOptions o;
      o.port = ws.port();
      o.tag = "b" + std::to_string(i);
      o.messages = 1 + i % 3;
      o.read_timeout = std::chrono::seconds(60);
      bots.push_back(std::async(std::launch::async, RunBot, o));
    }
    for (int i = 0; i < 2 * kSessions; ++i) logs[i] = bots[i].get();
    finished = hub.sessions_finished();
    ws.Stop();
    hub.Shutdown();
    guard.reset();
    loop.join();
  }

  Checks checks;
  long lines = 0;
  {
    std::ifstream in(dir / "transcripts.jsonl");
    for (std::string line; std::getline(in, line);) lines += !line.empty();
  }
  const auto transcripts = server::TranscriptStore(dir).Load();
  checks.Expect(lines == kSessions, std::to_string(lines) + " stored lines");
  checks.Expect(transcripts.size() == kSessions,
                std::to_string(transcripts.size()) + " distinct transcripts");
  checks.Expect(finished == kSessions,
                std::to_string(finished) + " sessions finished");
  std::map<std::string, const Transcript*> by_id;
  for (const auto& t : transcripts) {
    by_id[t.dialogue_id] = &t;
    checks.Expect(CheckTranscript(t).empty(), t.dialogue_id + " inconsistent");
  }

  struct Seen {
    std::string text;
    Agent from;
    Millis ts;
    bool operator==(const Seen&) const = default;
  };
  std::map<std::string, std::vector<int>> bots_of;
  std::map<int, std::vector<Seen>> seen_by_bot;
  long leaks = 0, frames = 0;
  for (int i = 0; i < 2 * kSessions; ++i) {
    const BotLog& log = logs[i];
    const std::string who = "bot " + std::to_string(i);
    checks.Expect(log.failure.empty(), who + ": " + log.failure);
    if (!log.paired || !log.outcome) {
      checks.Expect(false, who + " did not finish");
      continue;
    }
    const std::string& sid = log.paired->session_id;
    bots_of[sid].push_back(i);
    auto it = by_id.find(sid);
    if (it == by_id.end()) {
      checks.Expect(false, who + ": session " + sid + " not stored");
      continue;
    }
    const Transcript& t = *it->second;
    const Agent me = log.paired->you;
    std::map<int, EntityId> entity_of;
    for (const auto& [id, wire] : t.extra.at("wire_ids").items()) {
      entity_of[wire.get<int>()] = std::stoi(id);
    }
    auto own_wire = [&](int wire) {
      auto e = entity_of.find(wire);
      return e != entity_of.end() && t.world.Visible(me, e->second);
    };

    // The paired frame holds exactly the receiver's own observation.
    const AgentView& view = t.world.views[me];
    std::set<EntityId> shown;
    for (const Dot& d : log.paired->dots) {
      if (!own_wire(d.id)) {
        ++leaks;
        continue;
      }
      const Entity& e = t.world.entity(entity_of.at(d.id));
      shown.insert(e.id);
      if (std::abs(d.x - (e.x - view.center_x) / view.radius) > 1e-9 ||
          std::abs(d.y - (e.y - view.center_y) / view.radius) > 1e-9 ||
          d.size != e.size || d.color != e.color) {
        ++leaks;
      }
    }
    if (shown != std::set<EntityId>(view.visible_ids.begin(),
                                    view.visible_ids.end())) {
      ++leaks;
    }

    std::vector<Seen> seen;
    int paired_frames = 0;
    for (const auto& f : log.received) {
      ++frames;
      if (std::holds_alternative<PairedFrame>(f)) ++paired_frames;
      if (const auto* m = std::get_if<MessageFrame>(&f)) {
        if (!m->from || !m->ts) {
          ++leaks;
          continue;
        }
        seen.push_back({m->text, *m->from, *m->ts});
      } else if (const auto* a = std::get_if<AckFrame>(&f)) {
        if (a->entity && !own_wire(*a->entity)) ++leaks;
      } else if (const auto* o = std::get_if<OutcomeFrame>(&f)) {
        if (o->you && !own_wire(*o->you)) ++leaks;
        if (o->partner && !entity_of.count(*o->partner)) ++leaks;
      }
    }
    if (paired_frames != 1) ++leaks;
    std::vector<Seen> expected;
    for (const Event& e : t.events) {
      if (const auto* m = std::get_if<Message>(&e.action)) {
        expected.push_back({m->text, e.agent, e.ts});
      }
    }
    checks.Expect(seen == expected,
                  who + " saw a message sequence unlike " + sid);
    seen_by_bot[i] = std::move(seen);
  }
  for (const auto& [sid, members] : bots_of) {
    if (members.size() != 2) {
      checks.Expect(false, sid + " has " + std::to_string(members.size()) +
                               " clients");
      continue;
    }
    checks.Expect(seen_by_bot[members[0]] == seen_by_bot[members[1]],
                  sid + ": the two sides saw different message orders");
    // Every text comes from one of the session's own clients.
    const std::set<std::string> tags = {"b" + std::to_string(members[0]),
                                        "b" + std::to_string(members[1])};
    for (const Seen& s : seen_by_bot[members[0]]) {
      if (!tags.count(s.text.substr(0, s.text.find(' ')))) ++leaks;
    }
  }
  checks.Expect(leaks == 0, std::to_string(leaks) + " leaked items");
  fs::remove_all(dir);
  return checks.Finish(std::to_string(kSessions) + " concurrent sessions, " +
                       std::to_string(lines) + " transcripts persisted, " +
                       std::to_string(frames) + " frames audited, " +
                       std::to_string(leaks) + " leaks; both sides saw "
                       "identical message order");
}

struct Criterion {
  std::string name;
  bool needs_release;
  std::function<Result()> run;
};

int Main() {
  const std::vector<Criterion> criteria = {
      {"world-generation", false, WorldGeneration},
      {"engine-rules", false, EngineRules},
      {"random-baseline", false, RandomBaseline},
      {"gradient-suite", false, GradientSuite},
      {"overfit-sanity", false, OverfitSanity},
      {"release-import", true, ImportCounts},
      {"release-analysis", true, CorpusAnalysis},
      {"release-baselines", true, Baselines},
      {"server-sessions", false, ServerSessions},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Result r;
    if (c.needs_release && !ReleasePath()) {
      r = {Verdict::kSkip,
           "needs the released dialogue collection (set DOTREF_RELEASE)"};
    } else {
      try {
        r = c.run();
      } catch (const std::exception& e) {
        r = {Verdict::kFail, std::string("exception: ") + e.what()};
      }
    }
    const char* tag = r.verdict == Verdict::kPass   ? "PASS"
                      : r.verdict == Verdict::kSkip ? "SKIP"
                                                    : "FAIL";
    failures += r.verdict == Verdict::kFail;
    std::cout << tag << " " << c.name << ": " << r.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace dotref

int main() { return dotref::Main(); }
