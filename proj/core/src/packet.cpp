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

#include "scion/packet.hpp"

#include <algorithm>

namespace scion {

std::size_t addr_len(AddrType type) {
    switch (type) {
        case AddrType::None: return 0;
        case AddrType::Ipv4: return 4;
        case AddrType::Mac48: return 6;
        case AddrType::Ipv6: return 16;
        case AddrType::Aip: return 20;
    }
    throw ParseError("unknown address type");
}

void PacketHeader::set_src_addr(AddrType type, Bytes addr) {
    if (addr.size() != addr_len(type)) throw Error("source address length mismatch");
    src_type = type;
    src_addr_ = std::move(addr);
}

void PacketHeader::set_dst_addr(AddrType type, Bytes addr) {
    if (addr.size() != addr_len(type)) throw Error("destination address length mismatch");
    dst_type = type;
    dst_addr_ = std::move(addr);
}

std::size_t PacketHeader::path_region_bytes() const {
    std::size_t units = 0;
    for (const HeaderSegment& seg : segments) units += 1 + seg.ofs.size();
    return units * 8;
}

Bytes PacketHeader::encode() const {
    ByteWriter w;
    std::size_t total = 8 + src_addr_.size() + dst_addr_.size() +
                        path_region_bytes() + payload.size();
    w.u8(static_cast<std::uint8_t>((version << 4) |
                                   static_cast<std::uint8_t>(src_type)));
    w.u8(static_cast<std::uint8_t>(
        (static_cast<std::uint8_t>(dst_type) << 4) |
        static_cast<std::uint8_t>(segments.size() & 0x0f)));
    w.u16(static_cast<std::uint16_t>(total));
    w.u8(cur_info);
    w.u8(cur_of);
    w.u16(0);
    w.raw(src_addr_);
    w.raw(dst_addr_);
    for (const HeaderSegment& seg : segments) {
        w.raw(seg.info.encode());
        for (const OpaqueField& of : seg.ofs) w.raw(of.encode());
    }
    w.raw(payload);
    return w.take();
}

PacketHeader PacketHeader::decode(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    PacketHeader h;
    std::uint8_t b0 = r.u8();
    std::uint8_t b1 = r.u8();
    h.version = b0 >> 4;
    h.src_type = static_cast<AddrType>(b0 & 0x0f);
    h.dst_type = static_cast<AddrType>(b1 >> 4);
    std::uint8_t segment_count = b1 & 0x0f;
    std::uint16_t total = r.u16();
    if (total != bytes.size()) throw ParseError("total length mismatch");
    h.cur_info = r.u8();
    h.cur_of = r.u8();
    r.u16();
    h.src_addr_ = r.raw(addr_len(h.src_type));
    h.dst_addr_ = r.raw(addr_len(h.dst_type));
    auto read8 = [&r]() {
        Bytes raw = r.raw(8);
        std::array<std::uint8_t, 8> arr{};
        std::copy(raw.begin(), raw.end(), arr.begin());
        return arr;
    };
    for (std::uint8_t s = 0; s < segment_count; ++s) {
        HeaderSegment seg;
        seg.info = InfoField::decode(read8());
        if (seg.info.hop_count == 0) throw ParseError("segment with no OFs");
        for (std::uint8_t i = 0; i < seg.info.hop_count; ++i)
            seg.ofs.push_back(OpaqueField::decode(read8()));
        h.segments.push_back(std::move(seg));
    }
    h.payload = r.raw(r.remaining());

    // The pointers must address the path region.
    std::size_t units = h.path_region_bytes() / 8;
    if (!h.segments.empty() && (h.cur_info >= units || h.cur_of >= units))
        throw ParseError("path pointer out of range");
    return h;
}

std::uint8_t PacketHeader::info_unit(std::size_t segment) const {
    std::size_t unit = 0;
    for (std::size_t s = 0; s < segment; ++s) unit += 1 + segments[s].ofs.size();
    return static_cast<std::uint8_t>(unit);
}

std::uint8_t PacketHeader::of_unit(std::size_t segment, std::size_t of_index) const {
    return static_cast<std::uint8_t>(info_unit(segment) + 1 + of_index);
}

std::optional<PacketHeader::Position> PacketHeader::current() const {
    std::size_t unit = 0;
    for (std::size_t s = 0; s < segments.size(); ++s) {
        std::size_t of_count = segments[s].ofs.size();
        if (cur_info == unit && cur_of > unit && cur_of <= unit + of_count)
            return Position{s, static_cast<std::size_t>(cur_of - unit - 1)};
        unit += 1 + of_count;
    }
    return std::nullopt;
}

void PacketHeader::set_position(const Position& pos) {
    cur_info = info_unit(pos.segment);
    cur_of = of_unit(pos.segment, pos.of_index);
}

const OpaqueField* PacketHeader::chain_prior(const Position& pos) const {
    const HeaderSegment& seg = segments[pos.segment];
    if (seg.info.reversed) {
        for (std::size_t i = pos.of_index + 1; i < seg.ofs.size(); ++i)
            if (!seg.ofs[i].is_peering()) return &seg.ofs[i];
    } else {
        for (std::size_t i = pos.of_index; i-- > 0;)
            if (!seg.ofs[i].is_peering()) return &seg.ofs[i];
    }
    return nullptr;
}

bool PacketHeader::operator==(const PacketHeader& other) const {
    return version == other.version && src_type == other.src_type &&
           dst_type == other.dst_type && cur_info == other.cur_info &&
           cur_of == other.cur_of && src_addr_ == other.src_addr_ &&
           dst_addr_ == other.dst_addr_ && payload == other.payload &&
           [&] {
               if (segments.size() != other.segments.size()) return false;
               for (std::size_t i = 0; i < segments.size(); ++i) {
                   if (!(segments[i].info == other.segments[i].info)) return false;
                   if (segments[i].ofs != other.segments[i].ofs) return false;
               }
               return true;
           }();
}

PacketHeader encode_header(const EndToEndPath& path, AddrType src_type,
                           Bytes src_addr, AddrType dst_type, Bytes dst_addr) {
    if (path.slices.size() > 3) throw Error("path exceeds 3 segments");
    std::size_t total_ofs = path.of_count();
    if (total_ofs > 64) throw Error("path exceeds 64 hops");

    PacketHeader h;
    h.set_src_addr(src_type, std::move(src_addr));
    h.set_dst_addr(dst_type, std::move(dst_addr));

    for (const PathSlice& slice : path.slices) {
        HeaderSegment seg;
        seg.info.timestamp_s = slice.timestamp_s;
        seg.info.isd = slice.isd;
        seg.info.kind = slice.kind;
        seg.info.reversed = slice.reversed;
        seg.info.shortcut = slice.continuation.has_value();
        seg.info.peering = slice.peering;
        if (slice.reversed) {
            for (const PathHop& hop : slice.hops) seg.ofs.push_back(hop.of);
            if (slice.continuation) seg.ofs.push_back(*slice.continuation);
        } else {
            if (slice.continuation) seg.ofs.push_back(*slice.continuation);
            for (const PathHop& hop : slice.hops) seg.ofs.push_back(hop.of);
        }
        seg.info.hop_count = static_cast<std::uint8_t>(seg.ofs.size());
        h.segments.push_back(std::move(seg));
    }

    if (!h.segments.empty())
        h.set_position({0, h.segments.front().first_traversal()});
    return h;
}

PacketHeader reverse_header(const PacketHeader& header) {
    PacketHeader out;
    out.version = header.version;
    out.payload = header.payload;
    out.set_src_addr(header.dst_type, header.dst_addr());
    out.set_dst_addr(header.src_type, header.src_addr());

    std::size_t count = header.segments.size();
    for (std::size_t s = count; s-- > 0;) {
        const HeaderSegment& seg = header.segments[s];
        HeaderSegment rev;
        rev.info = seg.info;
        rev.info.reversed = !seg.info.reversed;
        if (seg.info.kind == SegmentKind::Up)
            rev.info.kind = SegmentKind::Down;
        else if (seg.info.kind == SegmentKind::Down)
            rev.info.kind = SegmentKind::Up;
        rev.ofs.assign(seg.ofs.rbegin(), seg.ofs.rend());
        out.segments.push_back(std::move(rev));
    }

    if (auto pos = header.current()) {
        std::size_t seg = count - 1 - pos->segment;
        std::size_t idx = header.segments[pos->segment].ofs.size() - 1 - pos->of_index;
        out.set_position({seg, idx});
    }
    return out;
}

}  // namespace scion
