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

#include "scion/beacon.hpp"

#include <algorithm>

namespace scion {

double jaccard(const std::set<AsId>& a, const std::set<AsId>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t intersection = 0;
    for (const AsId& id : a) intersection += b.count(id);
    std::size_t unions = a.size() + b.size() - intersection;
    return unions == 0 ? 0.0 : static_cast<double>(intersection) / unions;
}

bool CandidateStore::insert(Pcb pcb, std::int64_t now_us) {
    std::uint64_t shape = pcb.shape_digest();
    auto it = pool_.find(shape);
    if (it == pool_.end()) {
        pool_.emplace(shape, PoolEntry{std::move(pcb), now_us});
        return true;
    }
    if (pcb.info.timestamp_s > it->second.pcb.info.timestamp_s) {
        it->second = PoolEntry{std::move(pcb), now_us};
        return true;
    }
    return false;
}

std::vector<const PoolEntry*> CandidateStore::candidates(
    SegmentKind kind, std::int64_t now_us, const BeaconPolicy& policy) const {
    std::vector<const PoolEntry*> out;
    std::int64_t max_age = policy.max_age_us(kind);
    for (const auto& [shape, entry] : pool_) {
        if (entry.pcb.info.kind != kind) continue;
        if (now_us >= entry.pcb.expiry_us()) continue;
        // Staleness is about receipt, not origination: a deep path's beacon
        // timestamp lags one interval per level even while the path is
        // perfectly alive. A shape that stops being re-received (its links
        // died upstream) ages out here.
        if (now_us - entry.received_us > max_age) continue;
        out.push_back(&entry);
    }
    std::sort(out.begin(), out.end(), [](const PoolEntry* x, const PoolEntry* y) {
        return std::make_pair(x->pcb.info.origin, x->pcb.shape_digest()) <
               std::make_pair(y->pcb.info.origin, y->pcb.shape_digest());
    });
    return out;
}

std::size_t CandidateStore::purge_interface(const AsId& as, InterfaceId ifid) {
    std::size_t purged = 0;
    for (auto it = pool_.begin(); it != pool_.end();) {
        bool hit = false;
        for (const HopEntry& hop : it->second.pcb.hops) {
            if (hop.as_id == as && (hop.ingress_if == ifid || hop.egress_if == ifid))
                hit = true;
            for (const PeerEntry& peer : hop.peers) {
                if ((hop.as_id == as && peer.local_if == ifid) ||
                    (peer.peer == as && peer.peer_if == ifid))
                    hit = true;
            }
        }
        if (hit) {
            it = pool_.erase(it);
            ++purged;
        } else {
            ++it;
        }
    }
    return purged;
}

void CandidateStore::record_sent(const std::string& link_key, std::set<AsId> hop_set) {
    auto& history = sent_[link_key];
    history.push_back(std::move(hop_set));
    while (history.size() > kHistoryLimit) history.pop_front();
}

const std::deque<std::set<AsId>>& CandidateStore::sent_history(
    const std::string& link_key) const {
    static const std::deque<std::set<AsId>> kEmpty;
    auto it = sent_.find(link_key);
    return it == sent_.end() ? kEmpty : it->second;
}

namespace {

std::set<AsId> hop_as_set(const Pcb& pcb) {
    std::set<AsId> out;
    for (const HopEntry& hop : pcb.hops) out.insert(hop.as_id);
    return out;
}

bool carries_all_labels(const Pcb& pcb, const std::vector<std::string>& required,
                        const Topology& topo) {
    if (required.empty()) return true;
    for (const HopEntry& hop : pcb.hops) {
        if (!topo.has_as(hop.as_id)) return false;
        const AsNode& node = topo.as_node(hop.as_id);
        std::set<std::string> labels(node.labels.begin(), node.labels.end());
        if (hop.egress_if != kNoInterface) {
            if (const Link* link = topo.find_link(hop.as_id, hop.egress_if))
                labels.insert(link->labels.begin(), link->labels.end());
        }
        for (const std::string& want : required) {
            if (!labels.count(want)) return false;
        }
    }
    return true;
}

}  // namespace

std::vector<Pcb> score_and_select(const std::vector<const PoolEntry*>& candidates,
                                  const std::deque<std::set<AsId>>& sent_history,
                                  const BeaconPolicy& policy, SegmentKind kind,
                                  std::int64_t now_us, const Topology& topo,
                                  std::size_t k) {
    struct Scored {
        const PoolEntry* entry;
        std::set<AsId> hop_set;
        double base;  // score terms that do not depend on the sent history
    };

    std::vector<Scored> remaining;
    remaining.reserve(candidates.size());
    double interval_s = static_cast<double>(policy.interval_us(kind)) / 1e6;
    for (const PoolEntry* entry : candidates) {
        double len_term = 1.0 / static_cast<double>(entry->pcb.hops.size());
        double age_s =
            (now_us - static_cast<std::int64_t>(entry->pcb.info.timestamp_s) * 1'000'000) /
            1e6;
        double fresh = std::max(0.0, 1.0 - age_s / (3.0 * interval_s));
        double consistent =
            carries_all_labels(entry->pcb, policy.required_labels, topo) ? 1.0 : 0.0;
        remaining.push_back(Scored{
            entry, hop_as_set(entry->pcb),
            policy.w_len * len_term + policy.w_fresh * fresh +
                policy.w_consistency * consistent});
    }

    std::vector<std::set<AsId>> history(sent_history.begin(), sent_history.end());
    std::vector<Pcb> selected;
    std::size_t limit = k == 0 ? remaining.size() : std::min(k, remaining.size());

    while (selected.size() < limit && !remaining.empty()) {
        std::size_t best = 0;
        double best_score = -1.0;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            double overlap = 0.0;
            for (const auto& sent : history)
                overlap = std::max(overlap, jaccard(remaining[i].hop_set, sent));
            double score = remaining[i].base + policy.w_disjoint * (1.0 - overlap);
            const Pcb& cur = remaining[i].entry->pcb;
            const Pcb& top = remaining[best].entry->pcb;
            bool better = score > best_score;
            if (!better && score == best_score) {
                auto key = [](const Pcb& p) {
                    return std::make_tuple(p.info.timestamp_s, p.info.origin,
                                           p.shape_digest());
                };
                better = key(cur) < key(top);
            }
            if (better) {
                best = i;
                best_score = score;
            }
        }
        selected.push_back(remaining[best].entry->pcb);
        history.push_back(std::move(remaining[best].hop_set));
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return selected;
}

}  // namespace scion
