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

#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace scion::sim {

/// Monotone counters and sampled values, exported as sorted `key=value`
/// lines with a stable digest. Two runs with equal inputs export equal
/// bytes.
class Metrics {
  public:
    void add(const std::string& key, std::int64_t delta = 1) { values_[key] += delta; }
    void set(const std::string& key, std::int64_t value) { values_[key] = value; }
    void set_max(const std::string& key, std::int64_t value) {
        auto [it, fresh] = values_.emplace(key, value);
        if (!fresh && value > it->second) it->second = value;
    }

    std::int64_t get(const std::string& key) const {
        auto it = values_.find(key);
        return it == values_.end() ? 0 : it->second;
    }
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    /// Sum of all counters whose key starts with `prefix`.
    std::int64_t sum_prefix(const std::string& prefix) const;

    const std::map<std::string, std::int64_t>& values() const { return values_; }

    /// Line-oriented export, one `key=value` per line, sorted by key, with a
    /// final `digest=<16 hex>` line over everything above it.
    std::string export_records() const;
    std::uint64_t digest() const;

  private:
    std::map<std::string, std::int64_t> values_;
};

}  // namespace scion::sim
