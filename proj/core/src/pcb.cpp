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

#include "scion/pcb.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace scion {

namespace {

void write_info(ByteWriter& w, const PcbInfo& info, std::uint8_t hop_count) {
    w.u32(info.timestamp_s);
    w.as_id(info.origin);
    w.u16(info.isd);
    w.u8(static_cast<std::uint8_t>(info.kind));
    w.u8(hop_count);
    w.u16(0);  // reserved
}

// Hop entry body, excluding the signature.
Bytes hop_body(const HopEntry& hop) {
    ByteWriter w;
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
    return w.take();
}

void write_hop_record(ByteWriter& w, const HopEntry& hop) {
    Bytes body = hop_body(hop);
    w.u16(static_cast<std::uint16_t>(body.size() + 2 + hop.signature.size()));
    w.raw(body);
    w.blob(hop.signature);
}

}  // namespace

Bytes pcb_signing_input(const Pcb& pcb, std::size_t index) {
    ByteWriter w;
    write_info(w, pcb.info, static_cast<std::uint8_t>(index + 1));
    for (std::size_t i = 0; i < index; ++i) write_hop_record(w, pcb.hops[i]);
    w.raw(hop_body(pcb.hops[index]));
    return w.take();
}

Bytes Pcb::encode() const {
    ByteWriter w;
    write_info(w, info, static_cast<std::uint8_t>(hops.size()));
    for (const HopEntry& hop : hops) write_hop_record(w, hop);
    return w.take();
}

Pcb Pcb::decode(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    Pcb pcb;
    pcb.info.timestamp_s = r.u32();
    pcb.info.origin = r.as_id();
    pcb.info.isd = r.u16();
    pcb.info.kind = static_cast<SegmentKind>(r.u8());
    std::uint8_t hop_count = r.u8();
    r.u16();  // reserved
    for (std::uint8_t i = 0; i < hop_count; ++i) {
        std::uint16_t record_len = r.u16();
        std::size_t record_end = r.position() + record_len;
        HopEntry hop;
        hop.as_id = r.as_id();
        hop.ingress_if = r.u16();
        hop.egress_if = r.u16();
        std::array<std::uint8_t, 8> of_bytes{};
        Bytes raw = r.raw(8);
        std::copy(raw.begin(), raw.end(), of_bytes.begin());
        hop.of = OpaqueField::decode(of_bytes);
        hop.trc_version = r.u32();
        hop.cert_version = r.u32();
        std::uint8_t peer_count = r.u8();
        for (std::uint8_t p = 0; p < peer_count; ++p) {
            PeerEntry peer;
            peer.peer = r.as_id();
            peer.peer_if = r.u16();
            peer.local_if = r.u16();
            Bytes peer_of = r.raw(8);
            std::copy(peer_of.begin(), peer_of.end(), of_bytes.begin());
            peer.of = OpaqueField::decode(of_bytes);
            hop.peers.push_back(std::move(peer));
        }
        Bytes sig = r.blob();
        if (sig.size() != hop.signature.size()) throw ParseError("bad signature length");
        std::copy(sig.begin(), sig.end(), hop.signature.begin());
        if (r.position() != record_end) throw ParseError("hop record length mismatch");
        pcb.hops.push_back(std::move(hop));
    }
    if (!r.done()) throw ParseError("trailing bytes after beacon");
    return pcb;
}

std::vector<AsId> Pcb::as_sequence() const {
    std::vector<AsId> out;
    out.reserve(hops.size());
    for (const HopEntry& hop : hops) out.push_back(hop.as_id);
    return out;
}

bool Pcb::contains_as(const AsId& as) const {
    return std::any_of(hops.begin(), hops.end(),
                       [&](const HopEntry& h) { return h.as_id == as; });
}

std::uint64_t Pcb::shape_digest() const {
    ByteWriter w;
    w.u16(info.isd);
    w.u8(static_cast<std::uint8_t>(info.kind));
    w.as_id(info.origin);
    for (const HopEntry& hop : hops) {
        w.as_id(hop.as_id);
        w.u16(hop.ingress_if);
        w.u16(hop.egress_if);
    }
    return fnv1a64(w.bytes());
}

std::uint64_t Pcb::content_digest() const { return fnv1a64(encode()); }

std::int64_t Pcb::expiry_us() const {
    std::int64_t expiry = std::numeric_limits<std::int64_t>::max();
    for (const HopEntry& hop : hops)
        expiry = std::min(expiry, hop.of.expiry_us(info.timestamp_s));
    return expiry;
}

namespace {

HopEntry make_hop(const AsSecrets& secrets, InterfaceId ingress_if,
                  InterfaceId egress_if, const std::vector<PeerLinkSpec>& peers,
                  std::uint32_t trc_version, std::uint32_t cert_version,
                  std::uint8_t expiry_units, const OpaqueField* prior) {
    HopEntry hop;
    hop.as_id = secrets.owner;
    hop.ingress_if = ingress_if;
    hop.egress_if = egress_if;
    hop.trc_version = trc_version;
    hop.cert_version = cert_version;
    hop.of = build_of(secrets.mac_secret, 0, expiry_units, ingress_if, egress_if, prior);
    for (const PeerLinkSpec& spec : peers) {
        PeerEntry peer;
        peer.peer = spec.peer;
        peer.peer_if = spec.peer_if;
        peer.local_if = spec.local_if;
        peer.of = build_of(secrets.mac_secret, OpaqueField::kFlagPeering, expiry_units,
                           spec.local_if, egress_if, &hop.of);
        hop.peers.push_back(std::move(peer));
    }
    return hop;
}

}  // namespace

Pcb originate_pcb(const AsSecrets& secrets, const PcbInfo& info,
                  InterfaceId egress_if, const std::vector<PeerLinkSpec>& peers,
                  std::uint32_t trc_version, std::uint32_t cert_version,
                  std::uint8_t expiry_units) {
    Pcb pcb;
    pcb.info = info;
    pcb.hops.push_back(make_hop(secrets, kNoInterface, egress_if, peers, trc_version,
                                cert_version, expiry_units, nullptr));
    pcb.hops.back().signature =
        sign(secrets.signing.private_key, pcb_signing_input(pcb, 0));
    return pcb;
}

std::optional<Pcb> extend_pcb(const Pcb& pcb, const AsSecrets& secrets,
                              InterfaceId ingress_if, InterfaceId egress_if,
                              const std::vector<PeerLinkSpec>& peers,
                              std::uint32_t trc_version, std::uint32_t cert_version,
                              std::uint8_t expiry_units) {
    if (pcb.contains_as(secrets.owner)) return std::nullopt;
    Pcb extended = pcb;
    extended.hops.push_back(make_hop(secrets, ingress_if, egress_if, peers, trc_version,
                                     cert_version, expiry_units,
                                     &pcb.hops.back().of));
    extended.hops.back().signature = sign(
        secrets.signing.private_key, pcb_signing_input(extended, extended.hops.size() - 1));
    return extended;
}

PcbVerdict validate_pcb(const Pcb& pcb, const TrcStore& trcs, const CertStore& certs,
                        const Topology& topo, std::int64_t now_us,
                        const PcbValidationOptions& options) {
    auto invalid = [](std::string reason) {
        return PcbVerdict{PcbStatus::Invalid, std::move(reason), 0, 0, false};
    };

    if (pcb.hops.empty()) return invalid("empty");
    if (!topo.isds().count(pcb.info.isd)) return invalid("origin");
    if (pcb.hops.front().as_id != pcb.info.origin) return invalid("origin");
    if (pcb.hops.front().ingress_if != kNoInterface) return invalid("origin");
    if (!topo.has_as(pcb.info.origin)) return invalid("origin");

    if (pcb.info.kind == SegmentKind::Core) {
        for (const HopEntry& hop : pcb.hops) {
            if (!topo.has_as(hop.as_id) || !topo.as_node(hop.as_id).is_core())
                return invalid("origin");
        }
    } else {
        if (!topo.as_node(pcb.info.origin).is_core_in(pcb.info.isd))
            return invalid("origin");
    }

    std::set<AsId> seen;
    for (const HopEntry& hop : pcb.hops) {
        if (!seen.insert(hop.as_id).second) return invalid("loop");
        if (!topo.has_as(hop.as_id)) return invalid("adjacency");
    }

    for (std::size_t i = 0; i < pcb.hops.size(); ++i) {
        const HopEntry& hop = pcb.hops[i];
        bool terminal = hop.egress_if == kNoInterface;
        if (terminal && !(options.allow_terminal && i + 1 == pcb.hops.size()))
            return invalid("adjacency");
        if (hop.of.ingress_if != hop.ingress_if || hop.of.egress_if != hop.egress_if)
            return invalid("of-mismatch");
        if (hop.of.is_peering()) return invalid("of-mismatch");
        if (now_us >= hop.of.expiry_us(pcb.info.timestamp_s)) return invalid("expired");

        if (i > 0) {
            const HopEntry& prev = pcb.hops[i - 1];
            const Link* link = topo.find_link(prev.as_id, prev.egress_if);
            if (!link) return invalid("adjacency");
            if (link->other(prev.as_id) != hop.as_id ||
                link->if_of_other(prev.as_id) != hop.ingress_if)
                return invalid("adjacency");
            if (pcb.info.kind == SegmentKind::Core) {
                if (link->kind != LinkType::Core) return invalid("adjacency");
            } else {
                if (link->kind != LinkType::ProviderToCustomer || link->a != prev.as_id)
                    return invalid("adjacency");
            }
        }

        for (const PeerEntry& peer : hop.peers) {
            const Link* link = topo.find_link(hop.as_id, peer.local_if);
            if (!link || link->kind != LinkType::Peering) return invalid("peer adjacency");
            if (link->other(hop.as_id) != peer.peer ||
                link->if_of_other(hop.as_id) != peer.peer_if)
                return invalid("peer adjacency");
            if (!peer.of.is_peering() || peer.of.ingress_if != peer.local_if ||
                peer.of.egress_if != hop.egress_if)
                return invalid("of-mismatch");
        }
    }

    if (options.arrival) {
        const HopEntry& last = pcb.hops.back();
        const Link* link = topo.find_link(last.as_id, last.egress_if);
        if (!link || link->other(last.as_id) != options.arrival->first ||
            link->if_of_other(last.as_id) != options.arrival->second)
            return invalid("arrival");
    }

    // Trust checks: certificates under their referenced TRC versions, hop
    // signatures under the certificates. A hop attesting a TRC version newer
    // than the local store asks the caller to fetch it first.
    PcbVerdict verdict;
    for (std::size_t i = 0; i < pcb.hops.size(); ++i) {
        const HopEntry& hop = pcb.hops[i];
        auto current = trcs.current_version(hop.as_id.isd);
        if (!current || hop.trc_version > *current) {
            return PcbVerdict{PcbStatus::NeedsTrc, "", hop.as_id.isd, hop.trc_version,
                              verdict.stale_trc_seen};
        }
        if (hop.trc_version < *current) verdict.stale_trc_seen = true;

        const AsCert* cert = certs.get(hop.as_id);
        if (!cert) return invalid("cert unavailable");
        if (cert->trc_version != hop.cert_version) return invalid("cert version");
        CertVerdict cv = validate_cert_chain(*cert, trcs, now_us);
        if (cv == CertVerdict::UnknownTrc) {
            return PcbVerdict{PcbStatus::NeedsTrc, "", hop.as_id.isd, cert->trc_version,
                              verdict.stale_trc_seen};
        }
        if (cv != CertVerdict::Ok) return invalid("cert " + to_string(cv));

        if (!VerifyMemo::verify(cert->public_key, pcb_signing_input(pcb, i),
                                hop.signature))
            return invalid("signature");
    }

    verdict.status = PcbStatus::Valid;
    return verdict;
}

}  // namespace scion
