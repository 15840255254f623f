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

#include "scion/segment.hpp"

#include <algorithm>
#include <limits>

namespace scion {

std::vector<AsId> PathSegment::as_sequence() const {
    std::vector<AsId> out;
    out.reserve(hops.size());
    for (const SegmentHop& hop : hops) out.push_back(hop.as_id);
    return out;
}

bool PathSegment::uses_interface(const AsId& as, InterfaceId ifid) const {
    for (const SegmentHop& hop : hops) {
        if (hop.as_id == as && (hop.ingress_if == ifid || hop.egress_if == ifid))
            return true;
        for (const PeerEntry& peer : hop.peers) {
            if ((hop.as_id == as && peer.local_if == ifid) ||
                (peer.peer == as && peer.peer_if == ifid))
                return true;
        }
    }
    return false;
}

std::int64_t PathSegment::expiry_us() const {
    std::int64_t expiry = std::numeric_limits<std::int64_t>::max();
    for (const SegmentHop& hop : hops)
        expiry = std::min(expiry, hop.of.expiry_us(timestamp_s));
    return expiry;
}

std::uint64_t PathSegment::shape_digest() const {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(kind));
    w.u16(isd);
    w.as_id(origin);
    for (const SegmentHop& hop : hops) {
        w.as_id(hop.as_id);
        w.u16(hop.ingress_if);
        w.u16(hop.egress_if);
    }
    return fnv1a64(w.bytes());
}

std::uint64_t PathSegment::content_digest() const { return fnv1a64(encode()); }

Bytes PathSegment::encode() const {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(kind));
    w.u32(timestamp_s);
    w.as_id(origin);
    w.u16(isd);
    w.u8(static_cast<std::uint8_t>(hops.size()));
    for (const SegmentHop& hop : hops) {
        w.as_id(hop.as_id);
        w.u16(hop.ingress_if);
        w.u16(hop.egress_if);
        w.raw(hop.of.encode());
        w.u32(hop.trc_version);
        w.u32(hop.cert_version);
        w.u8(static_cast<std::uint8_t>(hop.peers.size()));
        for (const PeerEntry& peer : hop.peers) {
            w.as_id(peer.peer);
            w.u16(peer.peer_if);
            w.u16(peer.local_if);
            w.raw(peer.of.encode());
        }
        w.blob(hop.signature);
    }
    return w.take();
}

PathSegment PathSegment::decode(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    PathSegment seg;
    seg.kind = static_cast<SegmentKind>(r.u8());
    seg.timestamp_s = r.u32();
    seg.origin = r.as_id();
    seg.isd = r.u16();
    std::uint8_t hop_count = r.u8();
    auto read_of = [&r]() {
        Bytes raw = r.raw(8);
        std::array<std::uint8_t, 8> arr{};
        std::copy(raw.begin(), raw.end(), arr.begin());
        return OpaqueField::decode(arr);
    };
    for (std::uint8_t i = 0; i < hop_count; ++i) {
        SegmentHop hop;
        hop.as_id = r.as_id();
        hop.ingress_if = r.u16();
        hop.egress_if = r.u16();
        hop.of = read_of();
        hop.trc_version = r.u32();
        hop.cert_version = r.u32();
        std::uint8_t peer_count = r.u8();
        for (std::uint8_t p = 0; p < peer_count; ++p) {
            PeerEntry peer;
            peer.peer = r.as_id();
            peer.peer_if = r.u16();
            peer.local_if = r.u16();
            peer.of = read_of();
            hop.peers.push_back(std::move(peer));
        }
        Bytes sig = r.blob();
        if (sig.size() != hop.signature.size()) throw ParseError("bad signature length");
        std::copy(sig.begin(), sig.end(), hop.signature.begin());
        seg.hops.push_back(std::move(hop));
    }
    if (!r.done()) throw ParseError("trailing bytes after segment");
    return seg;
}

Pcb PathSegment::to_pcb() const {
    const PathSegment* beacon_order = this;
    PathSegment inverted;
    if (kind == SegmentKind::Up) {
        inverted = invert(*this);
        beacon_order = &inverted;
    }
    Pcb pcb;
    pcb.info.timestamp_s = beacon_order->timestamp_s;
    pcb.info.origin = beacon_order->origin;
    pcb.info.isd = beacon_order->isd;
    pcb.info.kind =
        beacon_order->kind == SegmentKind::Core ? SegmentKind::Core : SegmentKind::Up;
    for (const SegmentHop& hop : beacon_order->hops) {
        HopEntry entry;
        entry.as_id = hop.as_id;
        entry.ingress_if = hop.ingress_if;
        entry.egress_if = hop.egress_if;
        entry.of = hop.of;
        entry.peers = hop.peers;
        entry.trc_version = hop.trc_version;
        entry.cert_version = hop.cert_version;
        entry.signature = hop.signature;
        pcb.hops.push_back(std::move(entry));
    }
    return pcb;
}

PathSegment segment_from_pcb(const Pcb& pcb) {
    PathSegment seg;
    seg.kind = pcb.info.kind == SegmentKind::Core ? SegmentKind::Core : SegmentKind::Down;
    seg.timestamp_s = pcb.info.timestamp_s;
    seg.origin = pcb.info.origin;
    seg.isd = pcb.info.isd;
    for (const HopEntry& hop : pcb.hops) {
        SegmentHop s;
        s.as_id = hop.as_id;
        s.ingress_if = hop.ingress_if;
        s.egress_if = hop.egress_if;
        s.of = hop.of;
        s.peers = hop.peers;
        s.trc_version = hop.trc_version;
        s.cert_version = hop.cert_version;
        s.signature = hop.signature;
        seg.hops.push_back(std::move(s));
    }
    return seg;
}

PathSegment invert(const PathSegment& segment) {
    PathSegment out = segment;
    std::reverse(out.hops.begin(), out.hops.end());
    for (SegmentHop& hop : out.hops) std::swap(hop.ingress_if, hop.egress_if);
    if (segment.kind == SegmentKind::Up)
        out.kind = SegmentKind::Down;
    else if (segment.kind == SegmentKind::Down)
        out.kind = SegmentKind::Up;
    return out;
}

PcbVerdict validate_segment(const PathSegment& segment, const TrcStore& trcs,
                            const CertStore& certs, const Topology& topo,
                            std::int64_t now_us) {
    PcbValidationOptions options;
    options.allow_terminal = true;
    return validate_pcb(segment.to_pcb(), trcs, certs, topo, now_us, options);
}

}  // namespace scion
