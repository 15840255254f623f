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
#include <vector>

#include "scion/combine.hpp"
#include "scion/opaque.hpp"

namespace scion {

/// Host address formats. Forwarding never interprets addresses; any length
/// works end to end, including mixed source and destination formats.
enum class AddrType : std::uint8_t {
    None = 0,  // 0 bytes: the destination AS's default delivery target
    Ipv4 = 1,  // 4 bytes
    Mac48 = 2, // 6 bytes
    Ipv6 = 3,  // 16 bytes
    Aip = 4,   // 20 bytes
};

std::size_t addr_len(AddrType type);

struct HeaderSegment {
    InfoField info;
    std::vector<OpaqueField> ofs;  // traversal order; continuation entries at
                                   // the chain-prior end

    /// Index of the first/last OF a packet actually visits. An InfoField's
    /// shortcut flag pins one chain-only continuation entry at the prior end
    /// (the tail when reversed, the head otherwise).
    std::size_t first_traversal() const {
        return (!info.reversed && info.shortcut) ? 1 : 0;
    }
    std::size_t last_traversal() const {
        return ofs.size() - ((info.reversed && info.shortcut) ? 2 : 1);
    }
};

/// Packet header.
///
/// Fixed 8-byte prefix:
///   byte 0: version(4) | src addr type(4)
///   byte 1: dst addr type(4) | segment count(4)
///   bytes 2-3: total length (header + payload)
///   byte 4: current InfoField offset, in 8-byte units from the path region
///   byte 5: current OF offset, same units
///   bytes 6-7: reserved (zero)
/// followed by the source address, the destination address, the path region
/// (per segment: one InfoField then its OFs, 8 bytes each), then payload.
class PacketHeader {
  public:
    std::uint8_t version = 1;
    AddrType src_type = AddrType::None;
    AddrType dst_type = AddrType::None;
    std::uint8_t cur_info = 0;  // 8-byte units into the path region
    std::uint8_t cur_of = 0;
    std::vector<HeaderSegment> segments;
    Bytes payload;

    Bytes encode() const;
    static PacketHeader decode(std::span<const std::uint8_t> bytes);

    std::size_t path_region_bytes() const;

    void set_src_addr(AddrType type, Bytes addr);
    void set_dst_addr(AddrType type, Bytes addr);

    /// Address reads are counted so tests can assert that transit forwarding
    /// never looks at them.
    const Bytes& src_addr() const { ++addr_reads_; return src_addr_; }
    const Bytes& dst_addr() const { ++addr_reads_; return dst_addr_; }
    int addr_reads() const { return addr_reads_; }

    /// Segment/OF position of the current OF pointer, or nullopt when the
    /// path region is empty or the pointer is out of bounds.
    struct Position {
        std::size_t segment = 0;
        std::size_t of_index = 0;  // within the segment's OF list
    };
    std::optional<Position> current() const;
    void set_position(const Position& pos);

    /// Unit offsets of a segment's InfoField and one of its OFs.
    std::uint8_t info_unit(std::size_t segment) const;
    std::uint8_t of_unit(std::size_t segment, std::size_t of_index) const;

    /// The MAC chain predecessor of an OF: the first non-peering OF toward
    /// the beacon-order prior side (forward of it when the segment is
    /// reversed, before it otherwise); nullptr at a beacon origin.
    const OpaqueField* chain_prior(const Position& pos) const;

    bool operator==(const PacketHeader& other) const;

  private:
    Bytes src_addr_;
    Bytes dst_addr_;
    mutable int addr_reads_ = 0;
};

/// Encodes an end-to-end path into a header. Throws Error for paths with
/// more than 3 segments or more than 64 OFs. The current pointers are set to
/// the first traversal OF.
PacketHeader encode_header(const EndToEndPath& path, AddrType src_type,
                           Bytes src_addr, AddrType dst_type, Bytes dst_addr);

/// Inverts a header: the reply traverses the same OFs in the opposite
/// direction, with no re-MACing. The current pointer maps to its mirrored
/// position, src/dst addresses swap.
PacketHeader reverse_header(const PacketHeader& header);

}  // namespace scion
