// Copyright 2026 The PIE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Deterministic offset-preserving tokenizer and char-span <-> token-span
// alignment. A token is a maximal run of alphanumeric code points or a
// single non-whitespace, non-alphanumeric code point.

#ifndef PIE_TOKENIZE_HPP
#define PIE_TOKENIZE_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pie/errors.hpp"
#include "pie/unicode.hpp"

namespace pie {

/// start/end are code point offsets into the source text; text is the
/// UTF-8 slice they cover.
struct Token {
  std::size_t start;
  std::size_t end;
  std::string text;

  bool operator==(const Token&) const = default;
};

inline std::vector<Token> tokenize(std::string_view text) {
  const std::vector<CodePoint> cps = decode_utf8(text);
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_whitespace(cps[i].value)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (is_alnum(cps[i].value)) {
      while (j < cps.size() && is_alnum(cps[j].value)) ++j;
    }
    tokens.push_back(Token{
        i, j,
        std::string(text.substr(cps[i].byte_start, cps[j - 1].byte_end - cps[i].byte_start))});
    i = j;
  }
  return tokens;
}

/// Maps a char span onto the token index range [i,j) whose outer edges
/// coincide exactly with the span edges. No snapping: a span edge that
/// falls inside a token or into whitespace is an AlignmentError.
inline std::pair<std::size_t, std::size_t> char_span_to_token_span(
    const std::vector<Token>& tokens, std::size_t start, std::size_t end) {
  if (start >= end) {
    throw Error(ErrorKind::AlignmentError,
                "empty char span (" + std::to_string(start) + "," + std::to_string(end) + ")");
  }
  std::size_t first = tokens.size();
  std::size_t last = tokens.size();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].start == start) first = i;
    if (tokens[i].end == end) last = i;
  }
  if (first == tokens.size() || last == tokens.size() || last < first) {
    std::string nearest;
    for (const Token& t : tokens) {
      if (t.end >= start && nearest.empty()) {
        nearest = " nearest boundaries (" + std::to_string(t.start) + "," +
                  std::to_string(t.end) + ")";
      }
    }
    throw Error(ErrorKind::AlignmentError,
                "char span (" + std::to_string(start) + "," + std::to_string(end) +
                    ") does not align with token boundaries" + nearest);
  }
  return {first, last + 1};
}

inline std::pair<std::size_t, std::size_t> token_span_to_char_span(
    const std::vector<Token>& tokens, std::size_t i, std::size_t j) {
  if (i >= j || j > tokens.size()) {
    throw Error(ErrorKind::IndexOutOfRange,
                "token span [" + std::to_string(i) + "," + std::to_string(j) +
                    ") over " + std::to_string(tokens.size()) + " tokens");
  }
  return {tokens[i].start, tokens[j - 1].end};
}

}  // namespace pie

#endif  // PIE_TOKENIZE_HPP
