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
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "scion/pcb.hpp"

namespace scion {

/// Beaconing parameters. k values of 0 disable truncation.
struct BeaconPolicy {
    std::size_t k_intra = 5;
    std::int64_t interval_intra_us = 15ll * 1'000'000;
    std::size_t k_inter = 3;
    std::int64_t interval_inter_us = 60ll * 1'000'000;

    // Path-quality weights: length, diversity w.r.t. previously sent paths,
    // freshness, and label consistency. Nonnegative, summing to 1.
    double w_len = 0.4;
    double w_disjoint = 0.3;
    double w_fresh = 0.2;
    double w_consistency = 0.1;

    /// Labels every hop must carry for the consistency term to score 1.
    std::vector<std::string> required_labels;

    std::uint8_t expiry_units = kDefaultExpiryUnits;

    std::int64_t interval_us(SegmentKind kind) const {
        return kind == SegmentKind::Core ? interval_inter_us : interval_intra_us;
    }
    std::size_t k(SegmentKind kind) const {
        return kind == SegmentKind::Core ? k_inter : k_intra;
    }
    /// Candidates older than this fall out of the pool (the freshness term
    /// reaches zero at the same point).
    std::int64_t max_age_us(SegmentKind kind) const { return 3 * interval_us(kind); }
};

struct PoolEntry {
    Pcb pcb;
    std::int64_t received_us = 0;
};

/// Jaccard overlap of two AS-id sets.
double jaccard(const std::set<AsId>& a, const std::set<AsId>& b);

/// Received-beacon pool plus the per-link history of previously sent paths.
/// Pool entries are keyed by interface-level shape; a re-received shape keeps
/// the newest timestamp. Entries are assumed signature-valid on insertion.
class CandidateStore {
  public:
    /// Returns true if the pool changed (new shape, or fresher timestamp for
    /// a known shape).
    bool insert(Pcb pcb, std::int64_t now_us);

    /// Candidates of `kind` that are unexpired and younger than the policy's
    /// maximum age, in deterministic order (origin, then shape digest).
    std::vector<const PoolEntry*> candidates(SegmentKind kind, std::int64_t now_us,
                                             const BeaconPolicy& policy) const;

    /// Drops every entry whose hop list uses the interface. Returns the
    /// number of dropped entries.
    std::size_t purge_interface(const AsId& as, InterfaceId ifid);

    void record_sent(const std::string& link_key, std::set<AsId> hop_set);
    const std::deque<std::set<AsId>>& sent_history(const std::string& link_key) const;

    std::size_t pool_size() const { return pool_.size(); }

  private:
    std::map<std::uint64_t, PoolEntry> pool_;  // shape digest -> entry
    std::map<std::string, std::deque<std::set<AsId>>> sent_;
    static constexpr std::size_t kHistoryLimit = 64;
};

/// Greedy path-quality selection. Scores every candidate as
///
///   w_len * (1/len) + w_disjoint * (1 - max Jaccard overlap with paths
///   already sent on this link) + w_fresh * max(0, 1 - age/(3*interval)) +
///   w_consistency * (1 if every hop carries all required labels else 0)
///
/// picks the best, treats it as sent, and repeats, so one diverse path beats
/// the k-th near-duplicate whenever w_disjoint > 0. Ties break on older
/// timestamp, then lower origin AS, then shape digest.
std::vector<Pcb> score_and_select(const std::vector<const PoolEntry*>& candidates,
                                  const std::deque<std::set<AsId>>& sent_history,
                                  const BeaconPolicy& policy, SegmentKind kind,
                                  std::int64_t now_us, const Topology& topo,
                                  std::size_t k);

}  // namespace scion
