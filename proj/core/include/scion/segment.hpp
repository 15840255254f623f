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
#include <vector>

#include "scion/pcb.hpp"

namespace scion {

/// One hop of a path segment. ingress/egress are stored in traversal roles:
/// for an UP segment they are swapped relative to the beacon that produced
/// it, while the embedded OFs keep their beacon-time bytes (forwarding
/// interprets direction).
struct SegmentHop {
    AsId as_id;
    InterfaceId ingress_if = 0;
    InterfaceId egress_if = 0;
    OpaqueField of;
    std::vector<PeerEntry> peers;
    std::uint32_t trc_version = 0;
    std::uint32_t cert_version = 0;
    Signature signature{};

    bool operator==(const SegmentHop&) const = default;
};

/// A consumed beacon: UP segments run leaf-to-core, DOWN segments
/// core-to-leaf, CORE segments originating-core to receiving-core. Up and
/// down segments are mutual inversions; core segments invert onto
/// themselves kind-wise.
struct PathSegment {
    SegmentKind kind = SegmentKind::Down;
    std::uint32_t timestamp_s = 0;
    AsId origin;  // originating core AS of the underlying beacon
    IsdId isd = 0;

    std::vector<SegmentHop> hops;

    AsId first_as() const { return hops.front().as_id; }
    AsId last_as() const { return hops.back().as_id; }

    /// The core AS end: last hop of an UP segment, first hop of DOWN/CORE.
    AsId core_as() const { return kind == SegmentKind::Up ? last_as() : first_as(); }
    /// The non-core (or receiving) end.
    AsId leaf_as() const { return kind == SegmentKind::Up ? first_as() : last_as(); }

    std::vector<AsId> as_sequence() const;
    bool uses_interface(const AsId& as, InterfaceId ifid) const;

    std::int64_t expiry_us() const;  // min hop expiry
    std::uint64_t shape_digest() const;
    std::uint64_t content_digest() const;

    Bytes encode() const;
    static PathSegment decode(std::span<const std::uint8_t> bytes);

    /// Reconstructs the beacon this segment was extracted from (UP segments
    /// are un-inverted), for signature re-validation and audits.
    Pcb to_pcb() const;

    bool operator==(const PathSegment&) const = default;
};

/// Consumes a terminal-extended beacon into a segment in beacon order:
/// DOWN for intra-ISD beacons, CORE for core beacons.
PathSegment segment_from_pcb(const Pcb& pcb);

/// Flips the hop order and the per-hop ingress/egress roles. UP becomes DOWN
/// and vice versa; CORE stays CORE. OF bytes are preserved verbatim.
PathSegment invert(const PathSegment& segment);

/// Re-validates a segment (signatures, adjacency, loop freedom, expiry)
/// against the world; used by registration handling and the global audit.
PcbVerdict validate_segment(const PathSegment& segment, const TrcStore& trcs,
                            const CertStore& certs, const Topology& topo,
                            std::int64_t now_us);

}  // namespace scion
