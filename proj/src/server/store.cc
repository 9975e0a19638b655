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

#include "dotref/server/store.h"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>
#include <system_error>
#include <thread>

namespace dotref::server {

TranscriptStore::TranscriptStore(std::filesystem::path dir)
    : file_(dir / "transcripts.jsonl") {
  std::filesystem::create_directories(dir);
}

void TranscriptStore::WriteLine(const std::string& line) {
  const int fd = ::open(file_.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
  if (fd < 0) throw std::system_error(errno, std::generic_category(), "open");
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int err = errno;
      ::close(fd);
      throw std::system_error(err, std::generic_category(), "write");
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    const int err = errno;
    ::close(fd);
    throw std::system_error(err, std::generic_category(), "fsync");
  }
  ::close(fd);
}

void TranscriptStore::Append(const Transcript& transcript, int attempts,
                             std::chrono::milliseconds backoff) {
  nlohmann::json j = transcript;
  const std::string line = j.dump() + "\n";
  std::lock_guard<std::mutex> lock(mu_);
  for (int attempt = 1;; ++attempt) {
    try {
      WriteLine(line);
      return;
    } catch (const std::exception&) {
      if (attempt >= attempts) throw;
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
}

std::vector<Transcript> TranscriptStore::Load() const {
  std::vector<Transcript> out;
  if (!std::filesystem::exists(file_)) return out;
  std::ifstream in(file_);
  std::string line;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    // A torn final line from a crash mid-write is ignored.
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    Transcript t = j.get<Transcript>();
    if (seen.insert(t.dialogue_id).second) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace dotref::server
