// Copyright 2026 The scionsim Authors
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

#include "scion/sim/metrics.hpp"

#include <sstream>

#include "scion/bytes.hpp"

namespace scion::sim {

std::int64_t Metrics::sum_prefix(const std::string& prefix) const {
    std::int64_t total = 0;
    for (auto it = values_.lower_bound(prefix);
         it != values_.end() && it->first.compare(0, prefix.size(), prefix) == 0; ++it)
        total += it->second;
    return total;
}

std::string Metrics::export_records() const {
    std::ostringstream out;
    for (const auto& [key, value] : values_) out << key << "=" << value << "\n";
    std::string body = out.str();
    char digest_hex[17];
    std::snprintf(digest_hex, sizeof(digest_hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(body)));
    return body + "digest=" + digest_hex + "\n";
}

std::uint64_t Metrics::digest() const {
    std::ostringstream out;
    for (const auto& [key, value] : values_) out << key << "=" << value << "\n";
    return fnv1a64(out.str());
}

}  // namespace scion::sim
