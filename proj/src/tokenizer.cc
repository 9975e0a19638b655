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

#include "dotref/tokenizer.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>
#include <utility>

#include <boost/regex.hpp>

namespace dotref {

namespace {

struct Rule {
  boost::regex pattern;
  std::string replacement;  // perl format: $1, $&
};

Rule R(const char* pattern, const char* replacement) {
  return {boost::regex(pattern, boost::regex::perl), replacement};
}

struct Rules {
  std::vector<Rule> starting_quotes;
  std::vector<Rule> punctuation;
  Rule parens;
  Rule double_dashes;
  std::vector<Rule> ending_quotes;
  std::vector<Rule> contractions;
};

const Rules& TreebankRules() {
  static const Rules rules = [] {
    Rules r{
        {
            R("(«|“|‘|„|`+)", " $1 "),
            R("^\"", "``"),
            R("(``)", " $1 "),
            R("([ \\(\\[{<])(\"|'{2})", "$1 `` "),
            R("(?i)(?<!\\w)(')(?!(?:re|ve|ll|m|t|s|d|n)\\b)(?=\\w)", "$1 "),
        },
        {
            R("([^\\.])(\\.)((?:[\\]\\)}>\"' ]|»|”|’)*)\\s*$", "$1 $2 $3 "),
            R("([:,])([^\\d])", " $1 $2"),
            R("([:,])$", " $1 "),
            R("\\.{2,}", " $& "),
            R("[;@#$%&]", " $& "),
            R("(‒|–|—|―)", " $& "),
            R("([^\\.])(\\.)([\\]\\)}>\"']*)\\s*$", "$1 $2$3 "),
            R("[?!]", " $& "),
            R("([^'])' ", "$1 ' "),
            R("[*]", " $& "),
        },
        R("[\\]\\[\\(\\)\\{\\}\\<\\>]", " $& "),
        R("--", " -- "),
        {
            R("(»|”|’)", " $1 "),
            R("''", " '' "),
            R("\"", " '' "),
            R("\\s+", " "),
            R("([^' ])('[sS]|'[mM]|'[dD]|') ", "$1 $2 "),
            R("([^' ])('ll|'LL|'re|'RE|'ve|'VE|n't|N'T) ", "$1 $2 "),
        },
        {
            R("(?i)\\b(can)(?#X)(not)\\b", " $1 $2 "),
            R("(?i)\\b(d)(?#X)('ye)\\b", " $1 $2 "),
            R("(?i)\\b(gim)(?#X)(me)\\b", " $1 $2 "),
            R("(?i)\\b(gon)(?#X)(na)\\b", " $1 $2 "),
            R("(?i)\\b(got)(?#X)(ta)\\b", " $1 $2 "),
            R("(?i)\\b(lem)(?#X)(me)\\b", " $1 $2 "),
            R("(?i)\\b(more)(?#X)('n)\\b", " $1 $2 "),
            R("(?i)\\b(wan)(?#X)(na)(?=\\s)", " $1 $2 "),
            R("(?i) ('t)(?#X)(is)\\b", " $1 $2 "),
            R("(?i) ('t)(?#X)(was)\\b", " $1 $2 "),
        },
    };
    return r;
  }();
  return rules;
}

std::string Apply(const Rule& rule, const std::string& text) {
  return boost::regex_replace(text, rule.pattern, rule.replacement,
                              boost::format_perl);
}

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) words.push_back(word);
  return words;
}

bool IsAbbreviation(std::string_view word) {
  static constexpr std::array<std::string_view, 12> kKnown = {
      "mr.", "mrs.", "ms.", "dr.", "st.", "vs.",
      "etc.", "approx.", "jr.", "sr.", "no.", "prof."};
  std::string lower(word);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (std::find(kKnown.begin(), kKnown.end(), lower) != kKnown.end()) {
    return true;
  }
  // Initials and dotted abbreviations: "e.g.", "u.s.", "j."
  const auto body = lower.substr(0, lower.size() - 1);
  if (body.find('.') != std::string::npos) return true;
  return body.size() == 1 && std::isalpha(static_cast<unsigned char>(body[0]));
}

bool EndsSentence(const std::string& word) {
  std::string_view w = word;
  while (!w.empty() && std::string_view("\"')]}").find(w.back()) !=
                           std::string_view::npos) {
    w.remove_suffix(1);
  }
  if (w.empty()) return false;
  const char last = w.back();
  if (last == '?' || last == '!') return true;
  if (last != '.') return false;
  if (w.size() >= 2 && w[w.size() - 2] == '.') return false;  // ellipsis
  return !IsAbbreviation(w);
}

}  // namespace

std::vector<std::string> SplitSentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::string current;
  for (const auto& word : SplitWhitespace(text)) {
    if (!current.empty()) current += ' ';
    current += word;
    if (EndsSentence(word)) {
      sentences.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) sentences.push_back(std::move(current));
  return sentences;
}

std::vector<std::string> TokenizeSentence(std::string_view sentence) {
  const Rules& rules = TreebankRules();
  std::string text(sentence);
  for (const auto& rule : rules.starting_quotes) text = Apply(rule, text);
  for (const auto& rule : rules.punctuation) text = Apply(rule, text);
  text = Apply(rules.parens, text);
  text = Apply(rules.double_dashes, text);
  text = " " + text + " ";
  for (const auto& rule : rules.ending_quotes) text = Apply(rule, text);
  for (const auto& rule : rules.contractions) text = Apply(rule, text);
  return SplitWhitespace(text);
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  for (const auto& sentence : SplitSentences(text)) {
    for (auto& token : TokenizeSentence(sentence)) {
      std::transform(token.begin(), token.end(), token.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      tokens.push_back(std::move(token));
    }
  }
  return tokens;
}

}  // namespace dotref
