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
#include <string>
#include <vector>

#include "scion/crypto.hpp"
#include "scion/opaque.hpp"
#include "scion/topology.hpp"
#include "scion/trust.hpp"

namespace scion {

/// A peering link announced alongside a regular hop. The peering OF is built
/// by the announcing AS with its peering interface as ingress and the hop's
/// egress, and is MAC-chained to the hop's regular OF.
struct PeerEntry {
    AsId peer;
    InterfaceId peer_if = 0;   // interface on the peer's side
    InterfaceId local_if = 0;  // this AS's peering interface
    OpaqueField of;

    bool operator==(const PeerEntry&) const = default;
};

/// One AS's extension of a beacon: interfaces, forwarding OF, announced
/// peering links, attested trust versions, and a signature over everything
/// accumulated so far plus this entry's body.
struct HopEntry {
    AsId as_id;
    InterfaceId ingress_if = 0;  // 0 at the originating core AS
    InterfaceId egress_if = 0;   // 0 on a terminal (consuming) extension
    OpaqueField of;
    std::vector<PeerEntry> peers;
    std::uint32_t trc_version = 0;
    std::uint32_t cert_version = 0;
    Signature signature{};

    bool operator==(const HopEntry&) const = default;
};

struct PcbInfo {
    std::uint32_t timestamp_s = 0;
    AsId origin;  // originating core AS
    IsdId isd = 0;
    SegmentKind kind = SegmentKind::Up;  // Up: intra-ISD beacon; Core: core beacon

    bool operator==(const PcbInfo&) const = default;
};

/// Path Construction Beacon.
///
/// Canonical encoding: a 16-byte info field (timestamp 4, origin AS 6,
/// ISD 2, flags 1, hop count 1, reserved 2) followed by one length-prefixed
/// record per hop. Hop signatures cover the info field (with the hop count
/// as of that extension), all earlier hop records, and the entry body.
struct Pcb {
    PcbInfo info;
    std::vector<HopEntry> hops;

    Bytes encode() const;
    static Pcb decode(std::span<const std::uint8_t> bytes);

    std::vector<AsId> as_sequence() const;
    bool contains_as(const AsId& as) const;

    /// Digest of (isd, kind, origin, hop interface triples): identifies the
    /// interface-level path irrespective of timestamps and signatures.
    std::uint64_t shape_digest() const;
    std::uint64_t content_digest() const;

    /// Minimum hop expiry, in simulated microseconds.
    std::int64_t expiry_us() const;
};

struct PeerLinkSpec {
    AsId peer;
    InterfaceId peer_if = 0;
    InterfaceId local_if = 0;
};

/// Creates a single-hop beacon at a core AS, to be sent over `egress_if`.
Pcb originate_pcb(const AsSecrets& secrets, const PcbInfo& info,
                  InterfaceId egress_if, const std::vector<PeerLinkSpec>& peers,
                  std::uint32_t trc_version, std::uint32_t cert_version,
                  std::uint8_t expiry_units = kDefaultExpiryUnits);

/// Appends this AS's hop entry. `egress_if == kNoInterface` is a terminal
/// extension (the AS keeps the beacon as a path segment). Returns nullopt if
/// the AS is already present (loop).
std::optional<Pcb> extend_pcb(const Pcb& pcb, const AsSecrets& secrets,
                              InterfaceId ingress_if, InterfaceId egress_if,
                              const std::vector<PeerLinkSpec>& peers,
                              std::uint32_t trc_version, std::uint32_t cert_version,
                              std::uint8_t expiry_units = kDefaultExpiryUnits);

enum class PcbStatus : std::uint8_t {
    Valid,
    Invalid,
    NeedsTrc,  // a hop references a TRC version newer than the local store
};

struct PcbVerdict {
    PcbStatus status = PcbStatus::Invalid;
    std::string reason;         // for Invalid: "signature", "adjacency", ...
    IsdId needs_isd = 0;        // for NeedsTrc
    std::uint32_t needs_version = 0;
    bool stale_trc_seen = false;  // some hop referenced an older-than-current TRC

    bool valid() const { return status == PcbStatus::Valid; }
};

struct PcbValidationOptions {
    /// When set, the last hop's egress link must terminate at exactly this
    /// (AS, interface) — the receiving side of the link the PCB arrived on.
    std::optional<std::pair<AsId, InterfaceId>> arrival;
    /// Allow a final hop with egress 0 (validating consumed segments).
    bool allow_terminal = false;
};

/// Full validation: per-hop signatures under quorum-valid certificates,
/// link adjacency against the topology, loop freedom, expiry, peer-entry
/// consistency. Pure function of its inputs.
PcbVerdict validate_pcb(const Pcb& pcb, const TrcStore& trcs, const CertStore& certs,
                        const Topology& topo, std::int64_t now_us,
                        const PcbValidationOptions& options = {});

/// The byte string covered by hop `index`'s signature.
Bytes pcb_signing_input(const Pcb& pcb, std::size_t index);

}  // namespace scion
