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

// dotref: command-line front end. See docs/cli.md.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio/io_context.hpp>
#include <boost/asio/signal_set.hpp>

#include "CLI11.hpp"
#include "dotref/analysis.h"
#include "dotref/corpus.h"
#include "dotref/evaluation.h"
#include "dotref/model.h"
#include "dotref/simulate.h"
#include "dotref/stats.h"
#include "dotref/server/clock.h"
#include "dotref/server/hub.h"
#include "dotref/server/protocol.h"
#include "dotref/server/store.h"
#include "dotref/server/websocket.h"
#include "dotref/world.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace dotref {
namespace {

struct Globals {
  std::uint64_t seed = 1;
  bool verbose = false;
  bool json_output = false;
};

// A failure the user can fix; reported without a stack of context.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void Info(const Globals& g, const std::string& text) {
  if (g.verbose) std::cerr << text << '\n';
}

void EnsureParent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::ofstream OpenOut(const fs::path& path) {
  EnsureParent(path);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void WriteJsonFile(const fs::path& path, const json& j) {
  auto out = OpenOut(path);
  out << j.dump(2) << '\n';
}

void RequireFile(const fs::path& path) {
  if (!fs::is_regular_file(path)) {
    throw UsageError("no such file: " + path.string());
  }
}

fs::path DefaultNuanceDir() {
#ifdef DOTREF_DATA_DIR
  const fs::path installed = fs::path(DOTREF_DATA_DIR) / "nuance";
  if (fs::is_directory(installed)) return installed;
#endif
  return "data/nuance";
}

std::string Percent(double x) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << 100 * x << "%";
  return s.str();
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  int num_shared = 5;
  int count = 1;
  std::string out;
};

void RunGenerate(const Globals& g, const GenerateArgs& a) {
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!a.out.empty()) {
    file = OpenOut(a.out);
    out = &file;
  }
  for (int i = 0; i < a.count; ++i) {
    const World world = GenerateWorld(a.num_shared, g.seed + i);
    *out << json(world).dump() << '\n';
  }
  Info(g, "generated " + std::to_string(a.count) + " worlds");
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  int count = 100;
  std::string out;
  SimulationOptions options;
};

void RunSimulate(const Globals& g, const SimulateArgs& a) {
  const auto corpus = SimulateCorpus(a.count, g.seed, a.options);
  EnsureParent(a.out);
  WriteTranscripts(a.out, corpus);
  Info(g, "wrote " + std::to_string(corpus.size()) + " transcripts to " + a.out);
}

// ---------------------------------------------------------------------------
// serve

struct ServeArgs {
  std::string host = "0.0.0.0";
  unsigned short port = 8080;
  std::string store = "store";
  std::string ui;
  int threads = 0;
  double time_scale = 1.0;
};

void RunServe(const Globals& g, const ServeArgs& a) {
  namespace net = boost::asio;
  net::io_context io;
  server::SteadyClock clock(a.time_scale);
  server::TranscriptStore store(a.store);
  server::HubOptions options;
  options.seed = g.seed;
  options.tick_interval = std::chrono::milliseconds(
      std::max<long>(1, std::lround(1000.0 / a.time_scale)));
  server::Hub hub(io, clock, store, options);
  std::optional<fs::path> ui;
  if (!a.ui.empty()) {
    if (!fs::is_directory(a.ui)) throw UsageError("no such directory: " + a.ui);
    ui = a.ui;
  }
  server::WebSocketServer ws(
      io, hub, {net::ip::make_address(a.host), a.port}, ui);
  ws.Start();
  std::cerr << "dotref: listening on " << a.host << ":" << ws.port()
            << ", store " << store.file().string() << '\n';

  net::signal_set signals(io, SIGINT, SIGTERM);
  signals.async_wait([&](const boost::system::error_code&, int) {
    std::cerr << "dotref: shutting down\n";
    ws.Stop();
    hub.Shutdown();
    io.stop();
  });

  const int threads = a.threads > 0
                          ? a.threads
                          : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back([&] { io.run(); });
  io.run();
  for (auto& t : pool) t.join();
  std::cerr << "dotref: " << hub.sessions_finished() << " sessions finished\n";
}

// ---------------------------------------------------------------------------
// import

struct ImportArgs {
  std::string in;
  std::string out;
  bool lenient = false;
  ImportOptions options;
};

void RunImport(const Globals& g, const ImportArgs& a) {
  RequireFile(a.in);
  ImportOptions options = a.options;
  options.strict = !a.lenient;
  const ImportResult result = ImportRelease(a.in, options);
  EnsureParent(a.out);
  WriteTranscripts(a.out, result.transcripts);
  std::map<int, long> per_k;
  for (const auto& t : result.transcripts) ++per_k[t.num_shared];
  if (g.json_output) {
    json j = {{"imported", result.transcripts.size()},
              {"skipped", result.skipped}};
    for (const auto& [k, n] : per_k) j["per_num_shared"][std::to_string(k)] = n;
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::cout << "imported " << result.transcripts.size() << " dialogues";
  if (result.skipped) std::cout << " (" << result.skipped << " skipped)";
  std::cout << '\n';
  for (const auto& [k, n] : per_k) std::cout << "  k=" << k << ": " << n << '\n';
}

// ---------------------------------------------------------------------------
// split / vocab

struct SplitArgs {
  std::string in;
  std::string out;
};

void RunSplit(const Globals& g, const SplitArgs& a) {
  RequireFile(a.in);
  const Splits splits = SplitDataset(ReadTranscripts(a.in), g.seed);
  fs::create_directories(a.out);
  WriteTranscripts(fs::path(a.out) / "train.jsonl", splits.train);
  WriteTranscripts(fs::path(a.out) / "valid.jsonl", splits.valid);
  WriteTranscripts(fs::path(a.out) / "test.jsonl", splits.test);
  const json j = {{"train", splits.train.size()},
                  {"valid", splits.valid.size()},
                  {"test", splits.test.size()}};
  if (g.json_output) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "train " << splits.train.size() << ", valid "
              << splits.valid.size() << ", test " << splits.test.size() << '\n';
  }
}

struct VocabArgs {
  std::string in;
  std::string out;
  int min_count = Vocabulary::kDefaultMinCount;
};

void RunVocab(const Globals& g, const VocabArgs& a) {
  RequireFile(a.in);
  const Vocabulary vocab = Vocabulary::Build(ReadTranscripts(a.in), a.min_count);
  WriteJsonFile(a.out, vocab);
  if (g.json_output) {
    std::cout << json{{"size", vocab.size()}}.dump() << '\n';
  } else {
    std::cout << "vocabulary of " << vocab.size() << " tokens\n";
  }
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
  std::string in;
  std::string report;
  std::string plots;
  std::string dictionaries;
};

void RunAnalyze(const Globals& g, const AnalyzeArgs& a) {
  RequireFile(a.in);
  const auto transcripts = ReadTranscripts(a.in);
  const fs::path dict_dir =
      a.dictionaries.empty() ? DefaultNuanceDir() : fs::path(a.dictionaries);
  const auto categories = LoadNuanceDictionaries(dict_dir);
  const CorpusStats stats = BasicStats(transcripts);
  const NuanceRates nuance = NuanceCounts(transcripts, categories);
  const SelectionBias bias = ComputeSelectionBias(transcripts);
  const json report = {{"corpus", ToJson(stats)},
                       {"nuance", ToJson(nuance)},
                       {"selection_bias", ToJson(bias)}};
  if (!a.report.empty()) WriteJsonFile(a.report, report);

  if (!a.plots.empty()) {
    fs::create_directories(a.plots);
    auto labels = [](std::size_t n, double lo, double width) {
      std::vector<std::string> out;
      for (std::size_t i = 0; i < n; ++i) {
        std::ostringstream s;
        s << std::setprecision(3) << lo + width * i;
        out.push_back(s.str());
      }
      return out;
    };
    const double color_width =
        (kColorMax - kColorMin) / std::max<std::size_t>(1, bias.color_probability.size());
    OpenOut(fs::path(a.plots) / "selection_by_color.svg")
        << BarChartSvg("Selection probability by color (dark to light)",
                       labels(bias.color_probability.size(), kColorMin,
                              color_width),
                       bias.color_probability);
    const double size_width =
        kSizeRange / std::max<std::size_t>(1, bias.size_probability.size());
    OpenOut(fs::path(a.plots) / "selection_by_size.svg")
        << BarChartSvg("Selection probability by size (small to large)",
                       labels(bias.size_probability.size(), kSizeMin, size_width),
                       bias.size_probability);
    std::vector<std::string> names;
    std::vector<double> rates;
    for (const auto& c : categories) {
      names.push_back(c.name);
      rates.push_back(nuance.per_100_utterances.count(c.name)
                          ? nuance.per_100_utterances.at(c.name)
                          : 0.0);
    }
    OpenOut(fs::path(a.plots) / "nuance_per_100_utterances.svg")
        << BarChartSvg("Nuanced expressions per 100 utterances", names, rates);
  }

  if (g.json_output) {
    std::cout << report.dump(2) << '\n';
    return;
  }
  std::cout << "dialogues " << stats.overall.dialogues << ", utterances "
            << stats.overall.utterances << ", unique tokens "
            << stats.unique_tokens << ", top-decile occupancy "
            << Percent(stats.top_decile_occupancy) << '\n';
  for (const auto& [k, s] : stats.by_shared) {
    std::cout << "  k=" << k << ": " << s.dialogues << " dialogues, success "
              << Percent(s.SuccessRate()) << ", turns/dialogue "
              << s.AvgTurnsPerDialogue() << ", tokens/utterance "
              << s.AvgTokensPerUtterance() << '\n';
  }
  for (const auto& c : categories) {
    std::cout << "  " << c.name << ": "
              << (nuance.per_100_utterances.count(c.name)
                      ? nuance.per_100_utterances.at(c.name)
                      : 0.0)
              << " per 100 utterances\n";
  }
  std::cout << "darker share " << Percent(bias.DarkerShare())
            << ", larger share " << Percent(bias.LargerShare()) << " of "
            << bias.selections << " selections\n";
}

// ---------------------------------------------------------------------------
// train / eval

struct TrainArgs {
  std::string variant = "full-rn";
  std::string data;
  std::string out;
  std::string vocab;
  int min_count = Vocabulary::kDefaultMinCount;
  ModelConfig config;
};

void RunTrain(const Globals& g, const TrainArgs& a) {
  const fs::path dir(a.data);
  RequireFile(dir / "train.jsonl");
  RequireFile(dir / "valid.jsonl");
  ModelConfig config = a.config;
  config.variant = ParseVariant(a.variant);
  config.seed = g.seed;

  const auto train_dialogues = ReadTranscripts(dir / "train.jsonl");
  const auto valid_dialogues = ReadTranscripts(dir / "valid.jsonl");
  Vocabulary vocab;
  if (!a.vocab.empty()) {
    RequireFile(a.vocab);
    std::ifstream in(a.vocab);
    vocab = json::parse(in).get<Vocabulary>();
  } else {
    vocab = Vocabulary::Build(train_dialogues, a.min_count);
  }
  config.vocab_size = vocab.size();
  config.Validate();

  const auto train = MakeExamples(train_dialogues, vocab).examples;
  const auto valid = MakeExamples(valid_dialogues, vocab).examples;
  Info(g, "training " + std::string(VariantName(config.variant)) + " on " +
              std::to_string(train.size()) + " examples, vocabulary " +
              std::to_string(vocab.size()));
  const auto start = std::chrono::steady_clock::now();
  const TrainResult result =
      Train(train, valid, config, [&](const EpochLog& e) {
        if (g.verbose) {
          std::cerr << "epoch " << e.epoch << ": train loss " << e.train_loss
                    << ", valid loss " << e.valid_loss << ", valid accuracy "
                    << Percent(e.valid_accuracy) << '\n';
        }
      });
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  Model model{config, vocab, result.params, result.best_epoch,
              result.best_valid_loss};
  EnsureParent(a.out);
  SaveModel(a.out, model);
  json log = json::array();
  for (const auto& e : result.log) {
    log.push_back({{"epoch", e.epoch},
                   {"train_loss", e.train_loss},
                   {"valid_loss", e.valid_loss},
                   {"valid_accuracy", e.valid_accuracy}});
  }
  if (g.json_output) {
    std::cout << json{{"model", a.out},
                      {"best_epoch", result.best_epoch},
                      {"best_valid_loss", result.best_valid_loss},
                      {"seconds", seconds},
                      {"log", log}}
                     .dump(2)
              << '\n';
  } else {
    std::cout << "saved " << a.out << " (best epoch " << result.best_epoch
              << ", valid loss " << result.best_valid_loss << ", "
              << std::lround(seconds) << " s)\n";
  }
}

struct EvalArgs {
  std::string models;
  std::string data;
  std::string report;
};

std::vector<Model> LoadModelDir(const Globals& g, const fs::path& dir) {
  if (!fs::is_directory(dir)) throw UsageError("no such directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Model> models;
  for (const auto& file : files) {
    std::ifstream in(file);
    const json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object() || j.value("format", "") != "dotref-model-1") {
      Info(g, "skipping " + file.string() + " (not a model file)");
      continue;
    }
    models.push_back(LoadModel(file));
  }
  if (models.empty()) throw UsageError("no model files in " + dir.string());
  return models;
}

void RunEval(const Globals& g, const EvalArgs& a) {
  const fs::path test_file = fs::path(a.data) / "test.jsonl";
  RequireFile(test_file);
  const auto models = LoadModelDir(g, a.models);
  const EvalReport report =
      EvaluateModels(models, ReadTranscripts(test_file), g.seed);
  const json j = report;
  if (!a.report.empty()) WriteJsonFile(a.report, j);
  if (g.json_output) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::cout << "test examples: full " << report.full_examples
            << ", uncorrelated " << report.uncorrelated_examples
            << ", success-only " << report.success_only_examples << '\n';
  std::cout << "  random        " << Percent(report.random_accuracy) << '\n';
  for (const auto& r : report.variants) {
    std::cout << "  " << std::left << std::setw(12) << VariantName(r.variant)
              << "  " << Percent(r.full_mean) << " +- " << Percent(r.full_std)
              << " over " << r.seeds.size() << " seeds; uncorrelated "
              << Percent(r.uncorrelated_accuracy) << ", success-only "
              << Percent(r.success_only_accuracy) << '\n';
  }
  for (const auto& c : report.comparisons) {
    std::cout << "  " << VariantName(c.a) << " vs " << VariantName(c.b)
              << ": p = " << c.test.p << '\n';
  }
}

// ---------------------------------------------------------------------------
// selfcheck

struct SelfcheckArgs {
  int worlds = 1000;
  int logs = 200;
  int dialogues = 200;
};

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

CheckLine CheckWorlds(const Globals& g, int count) {
  std::vector<long> size_bins(10), color_bins(10);
  long failures = 0;
  std::string first;
  for (int k = 4; k <= 6; ++k) {
    for (int i = 0; i < count; ++i) {
      const World w = GenerateWorld(k, g.seed * 1'000'003 + i);
      const auto violations = ValidateWorld(w);
      if (!violations.empty()) {
        if (first.empty()) first = w.world_id + ": " + violations[0].invariant;
        ++failures;
      }
      for (const Entity& e : w.entities) {
        ++size_bins[std::min(9, static_cast<int>((e.size - kSizeMin) / kSizeRange * 10))];
        ++color_bins[std::min(
            9, static_cast<int>((e.color - kColorMin) / (kColorMax - kColorMin) * 10))];
      }
    }
  }
  const double p_size = ChiSquareUniformP(size_bins);
  const double p_color = ChiSquareUniformP(color_bins);
  std::ostringstream detail;
  detail << 3 * count << " worlds, " << failures << " invalid"
         << (first.empty() ? "" : " (" + first + ")") << "; uniformity p(size) = "
         << p_size << ", p(color) = " << p_color;
  return {"world invariants", failures == 0 && p_size > 1e-3 && p_color > 1e-3,
          detail.str()};
}

CheckLine CheckReplay(const Globals& g, int count) {
  int mismatches = 0;
  for (int i = 0; i < count; ++i) {
    auto world = std::make_shared<const World>(GenerateWorld(4 + i % 3, g.seed + i));
    const GameState played = RandomPlay(world, g.seed * 7 + i, 60);
    const auto replayed = Replay(world, played.started_at(),
                                 played.first_speaker(), played.events());
    if (!replayed || !(*replayed == played)) ++mismatches;
  }
  return {"engine replay", mismatches == 0,
          std::to_string(count) + " random logs, " + std::to_string(mismatches) +
              " mismatches"};
}

CheckLine CheckTranscripts(const Globals& g, int count) {
  const auto corpus = SimulateCorpus(count, g.seed);
  int bad = 0;
  for (const auto& t : corpus) {
    const Transcript round = json(t).get<Transcript>();
    if (!CheckTranscript(t).empty() || !(round == t)) ++bad;
  }
  return {"transcript round trip", bad == 0,
          std::to_string(count) + " simulated dialogues, " +
              std::to_string(bad) + " failed"};
}

CheckLine CheckModelGradients(const Globals& g) {
  const auto corpus = SimulateCorpus(4, g.seed);
  const Vocabulary vocab = Vocabulary::Build(corpus, 1);
  const auto examples = MakeExamples(corpus, vocab).examples;
  double worst = 0;
  std::string where;
  for (Variant v : kAllVariants) {
    ModelConfig c;
    c.variant = v;
    c.hidden = 12;
    c.embed_dim = 10;
    c.init_range = 0.3;
    c.vocab_size = vocab.size();
    Rng rng(g.seed);
    const Parameters p = Parameters::Init(c, rng);
    const GradientCheck check = CheckGradients(p, c, examples.front(), 1e-5, 6);
    if (check.max_relative_error >= worst) {
      worst = check.max_relative_error;
      where = std::string(VariantName(v)) + "/" + check.worst_tensor;
    }
  }
  std::ostringstream detail;
  detail << "max relative error " << worst << " at " << where;
  return {"model gradients", worst < 1e-3, detail.str()};
}

CheckLine CheckFrames(const Globals& g) {
  const auto corpus = SimulateCorpus(3, g.seed);
  int bad = 0;
  for (const auto& t : corpus) {
    server::Session s(t.dialogue_id, std::make_shared<const World>(t.world), 0, 0,
                      {}, g.seed);
    for (const auto& o : s.Start()) {
      auto back = server::DecodeFrame(server::EncodeFrame(o.frame));
      if (!back || !(*back == o.frame)) ++bad;
      if (const auto* p = std::get_if<server::PairedFrame>(&o.frame)) {
        if (p->dots.size() != kEntitiesPerView) ++bad;
      }
    }
  }
  return {"protocol frames", bad == 0, std::to_string(bad) + " bad frames"};
}

int RunSelfcheck(const Globals& g, const SelfcheckArgs& a) {
  std::vector<CheckLine> lines = {CheckWorlds(g, a.worlds),
                                  CheckReplay(g, a.logs),
                                  CheckTranscripts(g, a.dialogues),
                                  CheckModelGradients(g), CheckFrames(g)};
  const bool ok = std::all_of(lines.begin(), lines.end(),
                              [](const CheckLine& l) { return l.pass; });
  if (g.json_output) {
    json j = json::array();
    for (const auto& l : lines) {
      j.push_back({{"check", l.name}, {"pass", l.pass}, {"detail", l.detail}});
    }
    std::cout << json{{"pass", ok}, {"checks", j}}.dump(2) << '\n';
  } else {
    for (const auto& l : lines) {
      std::cout << (l.pass ? "PASS " : "FAIL ") << l.name << ": " << l.detail
                << '\n';
    }
  }
  return ok ? 0 : 1;
}

int Main(int argc, char** argv) {
  CLI::App app{"dotref: collaborative-referring dot game toolkit"};
  app.require_subcommand(1);
  // Global flags are accepted after the subcommand name as well.
  app.fallthrough();
  app.set_config("--config", "", "TOML or INI file with default flag values");
  Globals g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_flag("--verbose,-v", g.verbose, "progress on stderr");
  app.add_flag("--json", g.json_output, "machine-readable output on stdout");

  GenerateArgs generate;
  auto* cmd = app.add_subcommand("generate", "write random worlds as JSON lines");
  cmd->add_option("--num-shared,-k", generate.num_shared, "shared dots (4-6)")
      ->check(CLI::Range(4, 6))
      ->capture_default_str();
  cmd->add_option("--count,-n", generate.count, "number of worlds")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--out,-o", generate.out, "output file (default stdout)");
  cmd->callback([&] { RunGenerate(g, generate); });

  SimulateArgs simulate;
  cmd = app.add_subcommand("simulate", "write a synthetic transcript corpus");
  cmd->add_option("--count,-n", simulate.count, "number of dialogues")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--out,-o", simulate.out, "output JSON-lines file")->required();
  cmd->add_option("--salience", simulate.options.salience,
                  "chance the speaker targets the darkest/largest shared dot")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--resolve-rate", simulate.options.resolve_rate,
                  "chance the partner picks the same dot")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--expire-rate", simulate.options.expire_rate,
                  "chance a dialogue ends without selections")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->callback([&] { RunSimulate(g, simulate); });

  ServeArgs serve;
  cmd = app.add_subcommand("serve", "run the game server");
  cmd->add_option("--host", serve.host, "listen address")->capture_default_str();
  cmd->add_option("--port,-p", serve.port, "listen port (0 picks one)")
      ->capture_default_str();
  cmd->add_option("--store", serve.store, "transcript store directory")
      ->capture_default_str();
  cmd->add_option("--ui", serve.ui, "serve static browser client files from DIR");
  cmd->add_option("--threads", serve.threads, "I/O threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--time-scale", serve.time_scale,
                  "game seconds per real second (testing only)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->callback([&] { RunServe(g, serve); });

  ImportArgs import;
  cmd = app.add_subcommand("import", "convert the released dialogue collection");
  cmd->add_option("--in,-i", import.in, "released JSON or JSON-lines file")
      ->required();
  cmd->add_option("--out,-o", import.out, "transcript JSON-lines output")
      ->required();
  cmd->add_flag("--lenient", import.lenient,
                "skip records that fail checks instead of aborting");
  cmd->add_option("--center-x", import.options.view_center_px_x,
                  "view center x in pixels")
      ->capture_default_str();
  cmd->add_option("--center-y", import.options.view_center_px_y,
                  "view center y in pixels")
      ->capture_default_str();
  cmd->add_option("--radius", import.options.view_radius_px,
                  "view radius in pixels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->callback([&] { RunImport(g, import); });

  SplitArgs split;
  cmd = app.add_subcommand("split", "split transcripts into train/valid/test");
  cmd->add_option("--in,-i", split.in, "transcript JSON-lines file")->required();
  cmd->add_option("--out,-o", split.out, "output directory")->required();
  cmd->callback([&] { RunSplit(g, split); });

  VocabArgs vocab;
  cmd = app.add_subcommand("vocab", "build a vocabulary from training transcripts");
  cmd->add_option("--in,-i", vocab.in, "training transcripts")->required();
  cmd->add_option("--out,-o", vocab.out, "vocabulary JSON")->required();
  cmd->add_option("--min-count", vocab.min_count, "minimum token count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->callback([&] { RunVocab(g, vocab); });

  AnalyzeArgs analyze;
  cmd = app.add_subcommand("analyze", "corpus statistics, nuance and selection bias");
  cmd->add_option("--in,-i", analyze.in, "transcript JSON-lines file")->required();
  cmd->add_option("--report,-r", analyze.report, "JSON report output");
  cmd->add_option("--plots", analyze.plots, "directory for SVG bar charts");
  cmd->add_option("--dictionaries", analyze.dictionaries,
                  "nuance dictionary directory (default: shipped data/nuance)");
  cmd->callback([&] { RunAnalyze(g, analyze); });

  TrainArgs train;
  cmd = app.add_subcommand("train", "train a target-selection model");
  cmd->add_option("--variant", train.variant,
                  "context-mlp, context-rn, full-mlp or full-rn")
      ->check(CLI::IsMember({"context-mlp", "context-rn", "full-mlp", "full-rn"}))
      ->capture_default_str();
  cmd->add_option("--data,-d", train.data,
                  "directory with train.jsonl and valid.jsonl")
      ->required();
  cmd->add_option("--out,-o", train.out, "model file")->required();
  cmd->add_option("--vocab", train.vocab, "vocabulary JSON (default: built from train)");
  cmd->add_option("--min-count", train.min_count, "vocabulary minimum count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--epochs", train.config.epochs)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--batch-size", train.config.batch_size)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--hidden", train.config.hidden)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--embed-dim", train.config.embed_dim)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--dropout", train.config.dropout)
      ->check(CLI::Range(0.0, 0.99))
      ->capture_default_str();
  cmd->add_option("--lr", train.config.learning_rate)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--grad-clip", train.config.grad_clip)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->callback([&] { RunTrain(g, train); });

  EvalArgs eval;
  cmd = app.add_subcommand("eval", "evaluate trained models on the test split");
  cmd->add_option("--models,-m", eval.models, "directory of model files")
      ->required();
  cmd->add_option("--data,-d", eval.data, "directory with test.jsonl")->required();
  cmd->add_option("--report,-r", eval.report, "JSON report output");
  cmd->callback([&] { RunEval(g, eval); });

  SelfcheckArgs selfcheck;
  int selfcheck_status = 0;
  cmd = app.add_subcommand("selfcheck", "run the built-in invariant suites");
  cmd->add_option("--worlds", selfcheck.worlds, "worlds per shared count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--logs", selfcheck.logs, "random event logs to replay")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--dialogues", selfcheck.dialogues, "simulated transcripts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->callback([&] { selfcheck_status = RunSelfcheck(g, selfcheck); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "dotref: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "dotref: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "dotref: error: " << e.what() << '\n';
    return 1;
  }
  return selfcheck_status;
}

}  // namespace
}  // namespace dotref

int main(int argc, char** argv) { return dotref::Main(argc, argv); }
