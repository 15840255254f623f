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

#include <array>
#include <cstdint>
#include <optional>

#include "scion/crypto.hpp"
#include "scion/ids.hpp"

namespace scion {

enum class SegmentKind : std::uint8_t { Up = 0, Down = 1, Core = 2 };

std::string to_string(SegmentKind k);

/// Opaque Field: the 8-byte per-AS forwarding record carried in packet
/// headers. Layout (big-endian):
///
///   flags:8 | expiry:8 | ingress:12 | egress:12 | mac:24
///
/// flags bit 0 marks a peering OF; remaining bits are reserved zero. The MAC
/// covers flags, expiry, both interfaces, and the full 8 bytes of the prior
/// OF in beacon order (zeros at the origin), chaining each hop to its path
/// prefix so OFs cannot be spliced across paths. Bytes are immutable once
/// MACed; an OF's role as a chain-only continuation entry is encoded
/// positionally in the path header, never by mutating the OF.
struct OpaqueField {
    std::uint8_t flags = 0;
    std::uint8_t expiry_units = 0;  // units of 256 s after the segment timestamp
    InterfaceId ingress_if = 0;
    InterfaceId egress_if = 0;
    std::uint32_t mac = 0;  // 24 bits

    static constexpr std::uint8_t kFlagPeering = 0x01;

    bool is_peering() const { return flags & kFlagPeering; }

    std::array<std::uint8_t, 8> encode() const;
    static OpaqueField decode(const std::array<std::uint8_t, 8>& bytes);

    /// Absolute expiry in simulated microseconds, given the owning segment's
    /// timestamp.
    std::int64_t expiry_us(std::uint32_t segment_ts_s) const {
        return (static_cast<std::int64_t>(segment_ts_s) +
                static_cast<std::int64_t>(expiry_units) * 256) *
               1'000'000;
    }

    bool operator==(const OpaqueField&) const = default;
};

/// Default hop lifetime: 169 units of 256 s, about 12 hours.
inline constexpr std::uint8_t kDefaultExpiryUnits = 169;

OpaqueField build_of(const SymKey& mac_secret, std::uint8_t flags,
                     std::uint8_t expiry_units, InterfaceId ingress,
                     InterfaceId egress, const OpaqueField* prior);

enum class OfVerdict : std::uint8_t {
    Accept,
    RejectMac,
    RejectExpired,
    RejectWrongInterface,
};

std::string to_string(OfVerdict v);

/// Recomputes the MAC against `prior`, checks expiry against `now_us`, and
/// checks that the packet arrived on the directionally correct interface:
/// the OF's ingress when traveling in beacon direction, its egress when the
/// segment is being traversed in reverse. `arrival_if == kNoInterface` skips
/// the interface check (locally originated packets and segment crossovers).
OfVerdict verify_of(const SymKey& mac_secret, const OpaqueField& of,
                    const OpaqueField* prior, std::int64_t now_us,
                    std::uint32_t segment_ts_s, InterfaceId arrival_if,
                    bool reversed);

/// Per-segment header record: segment timestamp, ISD, traversal flags, and
/// the number of OFs that follow (continuation entries included).
struct InfoField {
    std::uint32_t timestamp_s = 0;
    IsdId isd = 0;
    SegmentKind kind = SegmentKind::Up;
    bool reversed = false;  // listed OFs run opposite to beacon order
    bool shortcut = false;  // one chain-continuation OF at the prior end
    bool peering = false;   // segment takes part in a peering splice
    std::uint8_t hop_count = 0;

    std::array<std::uint8_t, 8> encode() const;
    static InfoField decode(const std::array<std::uint8_t, 8>& bytes);

    bool operator==(const InfoField&) const = default;
};

}  // namespace scion
