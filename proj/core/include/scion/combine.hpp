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
#include <optional>
#include <set>
#include <vector>

#include "scion/path_store.hpp"
#include "scion/segment.hpp"

namespace scion {

enum class PathCase : std::uint8_t {
    Immediate,        // up and down share their core AS
    AsShortcut,       // the segments intersect below the core
    PeeringShortcut,  // spliced across a peering link announced in both
    CoreCombined,     // joined by a core segment
};

std::string to_string(PathCase c);

/// One traversal hop of an end-to-end path: arrival and exit interfaces in
/// travel direction, plus the OF that authorizes the hop.
struct PathHop {
    AsId as;
    InterfaceId ingress_if = 0;  // 0: packet originates here
    InterfaceId egress_if = 0;   // 0: delivered here or crossover exit
    OpaqueField of;
};

/// One header segment of an end-to-end path. `hops` are in traversal order;
/// `continuation` is the extra chain-only OF a shortcut needs so MACs keep
/// verifying after truncation (it sits after the hops when reversed, before
/// them otherwise).
struct PathSlice {
    SegmentKind kind = SegmentKind::Up;
    bool reversed = false;
    bool peering = false;
    std::uint32_t timestamp_s = 0;
    IsdId isd = 0;
    std::vector<PathHop> hops;
    std::optional<OpaqueField> continuation;

    std::size_t of_count() const { return hops.size() + (continuation ? 1 : 0); }
};

struct EndToEndPath {
    PathCase case_tag = PathCase::Immediate;
    AsId src;
    AsId dst;
    std::vector<PathSlice> slices;
    std::set<IsdId> isds_traversed;

    /// Visited ASes, crossover duplicates collapsed.
    std::vector<AsId> as_sequence() const;
    /// Inter-AS hops traveled.
    std::size_t hop_count() const;
    std::size_t of_count() const;
    /// 8 * (info fields + OFs), continuation entries included.
    std::size_t path_region_bytes() const;
    std::int64_t expiry_us() const;
};

/// Builds every valid combination of the given segments for src -> dst:
/// the immediate combination when up and down share a core, AS and peering
/// shortcuts (one candidate per intersection / per peering link announced on
/// both sides), and core-segment combinations. A destination lying on the
/// up-segment truncates it in place; loop-forming combinations are
/// discarded. Results are ranked by (fewest hops, latest expiry, case order,
/// AS sequence) — a total order, so output is reproducible.
///
/// `ups` may be empty only when src is a core AS, `downs` only when dst is.
std::vector<EndToEndPath> combine(const std::vector<PathSegment>& ups,
                                  const std::vector<PathSegment>& cores,
                                  const std::vector<PathSegment>& downs,
                                  const AsId& src, const AsId& dst,
                                  const Topology& topo);

/// Replays a path hop by hop against the topology: every consecutive pair
/// must be joined by the claimed interfaces, crossovers must stay within one
/// AS or cross the spliced peering link, and no AS may repeat. Returns an
/// error description, or nullopt when valid.
std::optional<std::string> check_path_validity(const EndToEndPath& path,
                                               const Topology& topo);

/// Brute-force enumeration of all loop-free valley-free AS sequences from
/// src to dst: ascending provider links, at most one peering crossing or a
/// run of core links, then descending customer links. Intended for worlds of
/// at most a dozen ASes; the combiner's output is a subset of this set.
std::set<std::vector<AsId>> enumerate_oracle(const Topology& topo, const AsId& src,
                                             const AsId& dst);

}  // namespace scion
