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
#include <vector>

#include "scion/segment.hpp"

namespace scion {

/// Default number of segments returned per direction on a lookup.
inline constexpr std::size_t kLookupK = 5;

struct LookupReply {
    std::vector<PathSegment> up;
    std::vector<PathSegment> core;
    std::vector<PathSegment> down;

    bool empty() const { return up.empty() && core.empty() && down.empty(); }
};

/// Keyed segment store with per-key capacity. Duplicated shapes keep the
/// newest timestamp; when a key is full the earliest-expiring segment is
/// evicted. Expired segments are never returned; revoked interfaces purge
/// every segment that uses them.
class SegmentStore {
  public:
    explicit SegmentStore(std::size_t capacity_per_key = 16)
        : capacity_(capacity_per_key) {}

    /// Returns true if the stored set changed.
    bool insert(const AsId& key, PathSegment segment);

    /// Unexpired segments for `key`, best first (fewest hops, then latest
    /// expiry), at most `k` (0 = all).
    std::vector<PathSegment> query(const AsId& key, std::int64_t now_us,
                                   std::size_t k = kLookupK) const;

    std::vector<AsId> keys() const;
    std::size_t size(const AsId& key) const;
    std::size_t total_size() const;

    /// Removes every segment using (as, ifid); returns the purge count.
    std::size_t purge_interface(const AsId& as, InterfaceId ifid);

    void clear() { store_.clear(); }

    /// Every stored segment, for audits.
    std::vector<const PathSegment*> all() const;

    /// Stable digest of the stored shape set under `key`; lets callers skip
    /// redundant re-registrations.
    std::uint64_t shape_set_digest(const AsId& key) const;

  private:
    struct Entry {
        PathSegment segment;
        std::int64_t expiry_us = 0;
    };
    std::map<AsId, std::vector<Entry>> store_;
    std::size_t capacity_;
};

}  // namespace scion
