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

// UTF-8 decoding and the small amount of code point classification the
// tokenizer and feature maps need. All offsets in the library count
// Unicode code points, never bytes.

#ifndef PIE_UNICODE_HPP
#define PIE_UNICODE_HPP

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "pie/errors.hpp"
#include "pie/unicode_tables.hpp"

namespace pie {

namespace detail {

template <std::size_t N>
inline bool in_ranges(const CpRange (&ranges)[N], char32_t cp) {
  auto it = std::upper_bound(std::begin(ranges), std::end(ranges), cp,
                             [](char32_t v, const CpRange& r) { return v < r.first; });
  return it != std::begin(ranges) && cp <= std::prev(it)->second;
}

}  // namespace detail

inline bool is_letter(char32_t cp) { return detail::in_ranges(detail::kLetterRanges, cp); }
inline bool is_number(char32_t cp) { return detail::in_ranges(detail::kNumberRanges, cp); }
inline bool is_upper(char32_t cp) { return detail::in_ranges(detail::kUpperRanges, cp); }
inline bool is_alnum(char32_t cp) { return is_letter(cp) || is_number(cp); }

// Unicode White_Space property.
inline bool is_whitespace(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x20: case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

/// One decoded code point with the byte range it occupies in the source.
struct CodePoint {
  char32_t value;
  std::size_t byte_start;
  std::size_t byte_end;
};

/// Decodes UTF-8; throws ParseError on malformed input.
inline std::vector<CodePoint> decode_utf8(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  std::size_t i = 0;
  const auto fail = [&](std::size_t at) -> void {
    throw Error(ErrorKind::ParseError,
                "malformed UTF-8 at byte " + std::to_string(at));
  };
  while (i < text.size()) {
    const unsigned char b0 = static_cast<unsigned char>(text[i]);
    char32_t cp = 0;
    std::size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      fail(i);
    }
    if (i + len > text.size()) fail(i);
    for (std::size_t k = 1; k < len; ++k) {
      const unsigned char b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) fail(i + k);
      cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong encodings, surrogates and out-of-range values.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      fail(i);
    }
    out.push_back(CodePoint{cp, i, i + len});
    i += len;
  }
  return out;
}

inline bool is_valid_utf8(std::string_view text) {
  try {
    decode_utf8(text);
    return true;
  } catch (const Error&) {
    return false;
  }
}

inline std::size_t utf8_length(std::string_view text) {
  return decode_utf8(text).size();
}

/// Slice of `text` covering code points [cp_start, cp_end).
inline std::string utf8_substr(std::string_view text, std::size_t cp_start, std::size_t cp_end) {
  const std::vector<CodePoint> cps = decode_utf8(text);
  if (cp_start > cp_end || cp_end > cps.size()) {
    throw Error(ErrorKind::IndexOutOfRange,
                "code point slice [" + std::to_string(cp_start) + "," +
                    std::to_string(cp_end) + ") over length " + std::to_string(cps.size()));
  }
  if (cp_start == cp_end) return std::string();
  const std::size_t b0 = cps[cp_start].byte_start;
  const std::size_t b1 = cps[cp_end - 1].byte_end;
  return std::string(text.substr(b0, b1 - b0));
}

// ASCII-only lowering; deterministic across platforms, which matters more
// here than linguistic coverage.
inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace pie

#endif  // PIE_UNICODE_HPP
