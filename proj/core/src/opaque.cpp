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

#include "scion/opaque.hpp"

#include <cstring>

namespace scion {

std::string to_string(SegmentKind k) {
    switch (k) {
        case SegmentKind::Up: return "UP";
        case SegmentKind::Down: return "DOWN";
        case SegmentKind::Core: return "CORE";
    }
    return "?";
}

std::string to_string(OfVerdict v) {
    switch (v) {
        case OfVerdict::Accept: return "accept";
        case OfVerdict::RejectMac: return "mac";
        case OfVerdict::RejectExpired: return "expired";
        case OfVerdict::RejectWrongInterface: return "wrong-interface";
    }
    return "?";
}

std::array<std::uint8_t, 8> OpaqueField::encode() const {
    std::array<std::uint8_t, 8> out{};
    out[0] = flags;
    out[1] = expiry_units;
    out[2] = static_cast<std::uint8_t>(ingress_if >> 4);
    out[3] = static_cast<std::uint8_t>(((ingress_if & 0x0f) << 4) | (egress_if >> 8));
    out[4] = static_cast<std::uint8_t>(egress_if & 0xff);
    out[5] = static_cast<std::uint8_t>(mac >> 16);
    out[6] = static_cast<std::uint8_t>(mac >> 8);
    out[7] = static_cast<std::uint8_t>(mac);
    return out;
}

OpaqueField OpaqueField::decode(const std::array<std::uint8_t, 8>& b) {
    OpaqueField of;
    of.flags = b[0];
    of.expiry_units = b[1];
    of.ingress_if = static_cast<InterfaceId>((b[2] << 4) | (b[3] >> 4));
    of.egress_if = static_cast<InterfaceId>(((b[3] & 0x0f) << 8) | b[4]);
    of.mac = (std::uint32_t{b[5]} << 16) | (std::uint32_t{b[6]} << 8) | b[7];
    return of;
}

namespace {

std::uint32_t compute_mac(const SymKey& mac_secret, const OpaqueField& of,
                          const OpaqueField* prior) {
    // Covered fields plus the prior OF's full 8 bytes (or zeros).
    std::array<std::uint8_t, 13> payload{};
    auto self = of.encode();
    std::memcpy(payload.data(), self.data(), 5);
    if (prior) {
        auto prev = prior->encode();
        std::memcpy(payload.data() + 5, prev.data(), 8);
    }
    return mac24(mac_secret, payload);
}

}  // namespace

OpaqueField build_of(const SymKey& mac_secret, std::uint8_t flags,
                     std::uint8_t expiry_units, InterfaceId ingress,
                     InterfaceId egress, const OpaqueField* prior) {
    OpaqueField of;
    of.flags = flags;
    of.expiry_units = expiry_units;
    of.ingress_if = ingress;
    of.egress_if = egress;
    of.mac = compute_mac(mac_secret, of, prior);
    return of;
}

OfVerdict verify_of(const SymKey& mac_secret, const OpaqueField& of,
                    const OpaqueField* prior, std::int64_t now_us,
                    std::uint32_t segment_ts_s, InterfaceId arrival_if,
                    bool reversed) {
    if (compute_mac(mac_secret, of, prior) != of.mac) return OfVerdict::RejectMac;
    if (now_us >= of.expiry_us(segment_ts_s)) return OfVerdict::RejectExpired;
    if (arrival_if != kNoInterface) {
        InterfaceId expected = reversed ? of.egress_if : of.ingress_if;
        if (arrival_if != expected) return OfVerdict::RejectWrongInterface;
    }
    return OfVerdict::Accept;
}

std::array<std::uint8_t, 8> InfoField::encode() const {
    std::array<std::uint8_t, 8> out{};
    out[0] = static_cast<std::uint8_t>(timestamp_s >> 24);
    out[1] = static_cast<std::uint8_t>(timestamp_s >> 16);
    out[2] = static_cast<std::uint8_t>(timestamp_s >> 8);
    out[3] = static_cast<std::uint8_t>(timestamp_s);
    out[4] = static_cast<std::uint8_t>(isd >> 8);
    out[5] = static_cast<std::uint8_t>(isd);
    out[6] = static_cast<std::uint8_t>((static_cast<std::uint8_t>(kind) & 0x03) |
                                       (reversed ? 0x04 : 0) | (shortcut ? 0x08 : 0) |
                                       (peering ? 0x10 : 0));
    out[7] = hop_count;
    return out;
}

InfoField InfoField::decode(const std::array<std::uint8_t, 8>& b) {
    InfoField info;
    info.timestamp_s = (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
                       (std::uint32_t{b[2]} << 8) | b[3];
    info.isd = static_cast<IsdId>((b[4] << 8) | b[5]);
    info.kind = static_cast<SegmentKind>(b[6] & 0x03);
    info.reversed = b[6] & 0x04;
    info.shortcut = b[6] & 0x08;
    info.peering = b[6] & 0x10;
    info.hop_count = b[7];
    return info;
}

}  // namespace scion
