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

#include <cstring>
#include <map>
#include <random>
#include <string>

#include "scion/crypto.hpp"

namespace scion::sim {

/// One seeded generator per component id, each stream derived independently
/// from the scenario seed, so adding a component never perturbs the draws of
/// the others.
class RngStreams {
  public:
    explicit RngStreams(std::uint64_t seed) : seed_(seed) {}

    std::mt19937_64& stream(const std::string& component) {
        auto it = streams_.find(component);
        if (it == streams_.end()) {
            auto expanded = expand_seed(seed_, "rng/" + component);
            std::uint64_t s = 0;
            std::memcpy(&s, expanded.data(), sizeof(s));
            it = streams_.emplace(component, std::mt19937_64(s)).first;
        }
        return it->second;
    }

    std::uint64_t next(const std::string& component) { return stream(component)(); }

  private:
    std::uint64_t seed_;
    std::map<std::string, std::mt19937_64> streams_;
};

}  // namespace scion::sim
