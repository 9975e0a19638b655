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

#ifndef DOTREF_SERVER_STORE_H_
#define DOTREF_SERVER_STORE_H_

#include <chrono>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "dotref/corpus.h"

namespace dotref::server {

// Append-only JSON-lines transcript store at DIR/transcripts.jsonl. Appends
// from concurrent sessions are serialized; each line is fsynced before
// Append returns.
class TranscriptStore {
 public:
  explicit TranscriptStore(std::filesystem::path dir);
  virtual ~TranscriptStore() = default;

  const std::filesystem::path& file() const { return file_; }

  // Retries failed writes with exponential backoff; throws the last error
  // after `attempts` failures.
  void Append(const Transcript& transcript, int attempts = 5,
              std::chrono::milliseconds backoff = std::chrono::milliseconds(20));

  // Every stored transcript, keeping the first line for each dialogue id.
  std::vector<Transcript> Load() const;

 protected:
  // One durable write of a complete line. Throws on failure.
  virtual void WriteLine(const std::string& line);

 private:
  std::filesystem::path file_;
  std::mutex mu_;
};

}  // namespace dotref::server

#endif  // DOTREF_SERVER_STORE_H_
