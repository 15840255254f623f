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

#include "scion/path_store.hpp"

#include <algorithm>

namespace scion {

bool SegmentStore::insert(const AsId& key, PathSegment segment) {
    auto& entries = store_[key];
    std::uint64_t shape = segment.shape_digest();
    std::int64_t expiry = segment.expiry_us();

    for (Entry& entry : entries) {
        if (entry.segment.shape_digest() != shape) continue;
        if (segment.timestamp_s <= entry.segment.timestamp_s) return false;
        entry.segment = std::move(segment);
        entry.expiry_us = expiry;
        return true;
    }

    if (entries.size() >= capacity_) {
        auto victim = std::min_element(entries.begin(), entries.end(),
                                       [](const Entry& a, const Entry& b) {
                                           if (a.expiry_us != b.expiry_us)
                                               return a.expiry_us < b.expiry_us;
                                           return a.segment.shape_digest() <
                                                  b.segment.shape_digest();
                                       });
        entries.erase(victim);
    }
    entries.push_back(Entry{std::move(segment), expiry});
    return true;
}

std::vector<PathSegment> SegmentStore::query(const AsId& key, std::int64_t now_us,
                                             std::size_t k) const {
    auto it = store_.find(key);
    if (it == store_.end()) return {};
    std::vector<const Entry*> live;
    for (const Entry& entry : it->second) {
        if (entry.expiry_us > now_us) live.push_back(&entry);
    }
    std::sort(live.begin(), live.end(), [](const Entry* a, const Entry* b) {
        auto rank = [](const Entry* e) {
            return std::make_tuple(e->segment.hops.size(), -e->expiry_us,
                                   e->segment.shape_digest());
        };
        return rank(a) < rank(b);
    });
    if (k != 0 && live.size() > k) live.resize(k);
    std::vector<PathSegment> out;
    out.reserve(live.size());
    for (const Entry* entry : live) out.push_back(entry->segment);
    return out;
}

std::vector<AsId> SegmentStore::keys() const {
    std::vector<AsId> out;
    for (const auto& [key, entries] : store_)
        if (!entries.empty()) out.push_back(key);
    return out;
}

std::size_t SegmentStore::size(const AsId& key) const {
    auto it = store_.find(key);
    return it == store_.end() ? 0 : it->second.size();
}

std::size_t SegmentStore::total_size() const {
    std::size_t n = 0;
    for (const auto& [key, entries] : store_) n += entries.size();
    return n;
}

std::size_t SegmentStore::purge_interface(const AsId& as, InterfaceId ifid) {
    std::size_t purged = 0;
    for (auto& [key, entries] : store_) {
        auto end = std::remove_if(entries.begin(), entries.end(), [&](const Entry& e) {
            return e.segment.uses_interface(as, ifid);
        });
        purged += static_cast<std::size_t>(entries.end() - end);
        entries.erase(end, entries.end());
    }
    return purged;
}

std::vector<const PathSegment*> SegmentStore::all() const {
    std::vector<const PathSegment*> out;
    for (const auto& [key, entries] : store_)
        for (const Entry& entry : entries) out.push_back(&entry.segment);
    return out;
}

std::uint64_t SegmentStore::shape_set_digest(const AsId& key) const {
    auto it = store_.find(key);
    if (it == store_.end()) return 0;
    std::vector<std::uint64_t> shapes;
    for (const Entry& entry : it->second)
        shapes.push_back(entry.segment.shape_digest());
    std::sort(shapes.begin(), shapes.end());
    ByteWriter w;
    for (std::uint64_t shape : shapes) w.u64(shape);
    return fnv1a64(w.bytes());
}

}  // namespace scion
