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

// BIO tag sequences over token spans. Decoding is lenient: a stray I-X
// opens a span like B-X would, which also absorbs IOB1-style corpora.

#ifndef PIE_BIO_HPP
#define PIE_BIO_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "pie/errors.hpp"

namespace pie {

/// A labeled token index range [start, end).
struct TokenSpan {
  std::size_t start;
  std::size_t end;
  std::string label;

  bool operator==(const TokenSpan&) const = default;
};

inline bool is_valid_bio_tag(const std::string& tag) {
  if (tag == "O") return true;
  return tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-';
}

/// Lenient decode: a span starts at B-X, or at I-X whose predecessor is
/// neither B-X nor I-X, and continues through subsequent I-X. Total over
/// any sequence of valid tags; the result never overlaps.
inline std::vector<TokenSpan> bio_decode(const std::vector<std::string>& tags) {
  std::vector<TokenSpan> spans;
  bool open = false;
  std::size_t open_start = 0;
  std::string open_label;
  const auto close = [&](std::size_t end) {
    if (open) {
      spans.push_back(TokenSpan{open_start, end, open_label});
      open = false;
    }
  };
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const std::string& tag = tags[i];
    if (!is_valid_bio_tag(tag)) {
      throw Error(ErrorKind::TagVocabularyError, "malformed tag '" + tag + "'");
    }
    if (tag == "O") {
      close(i);
      continue;
    }
    const std::string label = tag.substr(2);
    if (tag[0] == 'B' || !open || open_label != label) {
      close(i);
      open = true;
      open_start = i;
      open_label = label;
    }
  }
  close(tags.size());
  return spans;
}

/// Inverse direction: spans to tags over n tokens. Spans must lie within
/// [0, n) and not overlap on any token.
inline std::vector<std::string> bio_encode(std::size_t n, const std::vector<TokenSpan>& spans) {
  std::vector<std::string> tags(n, "O");
  for (const TokenSpan& span : spans) {
    if (span.start >= span.end || span.end > n) {
      throw Error(ErrorKind::IndexOutOfRange,
                  "token span [" + std::to_string(span.start) + "," +
                      std::to_string(span.end) + ") over " + std::to_string(n) + " tokens");
    }
    for (std::size_t i = span.start; i < span.end; ++i) {
      if (tags[i] != "O") {
        throw Error(ErrorKind::OverlapError,
                    "spans overlap on token " + std::to_string(i));
      }
      tags[i] = (i == span.start ? "B-" : "I-") + span.label;
    }
  }
  return tags;
}

}  // namespace pie

#endif  // PIE_BIO_HPP
