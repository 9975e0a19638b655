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

#ifndef DOTREF_TOKENIZER_H_
#define DOTREF_TOKENIZER_H_

#include <string>
#include <string_view>
#include <vector>

namespace dotref {

// Treebank-style word tokenization followed by lowercasing.
//
// The text is first cut into sentences (a token ending in '.', '?' or '!'
// closes a sentence unless it looks like an abbreviation or an ellipsis),
// then each sentence goes through the regex passes of the improved Penn
// Treebank tokenizer: quotes become `` and '', punctuation is split off,
// clitics n't 's 'm 'd 're 've 'll are separated, and only the
// sentence-final period is detached.
std::vector<std::string> Tokenize(std::string_view text);

// Tokenization of one sentence, without lowercasing.
std::vector<std::string> TokenizeSentence(std::string_view sentence);

std::vector<std::string> SplitSentences(std::string_view text);

}  // namespace dotref

#endif  // DOTREF_TOKENIZER_H_
