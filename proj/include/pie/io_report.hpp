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

#ifndef PIE_IO_REPORT_HPP
#define PIE_IO_REPORT_HPP

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace pie {

/// Accounting for corpus readers: nothing is dropped silently, every skip
/// carries the location (file, line or annotation id) and a reason.
struct IoReport {
  struct Skipped {
    std::string location;
    std::string reason;
  };

  std::size_t documents_read = 0;
  std::size_t annotations_read = 0;
  std::vector<Skipped> skipped;

  void skip(std::string location, std::string reason) {
    skipped.push_back(Skipped{std::move(location), std::move(reason)});
  }

  IoReport& operator+=(const IoReport& other) {
    documents_read += other.documents_read;
    annotations_read += other.annotations_read;
    skipped.insert(skipped.end(), other.skipped.begin(), other.skipped.end());
    return *this;
  }

  void print(std::ostream& os) const {
    os << "read " << documents_read << " documents, " << annotations_read
       << " annotations";
    if (!skipped.empty()) os << ", skipped " << skipped.size() << " entries";
    os << "\n";
    for (const Skipped& s : skipped) {
      os << "  skipped " << s.location << ": " << s.reason << "\n";
    }
  }
};

}  // namespace pie

#endif  // PIE_IO_REPORT_HPP
