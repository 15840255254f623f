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

#include "scion/forward.hpp"

namespace scion {

std::string to_string(DropReason r) {
    switch (r) {
        case DropReason::Parse: return "parse";
        case DropReason::Mac: return "mac";
        case DropReason::Expired: return "expired";
        case DropReason::WrongInterface: return "wrong-interface";
        case DropReason::LinkDown: return "link-down";
        case DropReason::Malformed: return "malformed";
    }
    return "?";
}

namespace {

DropReason map_reason(OfVerdict v) {
    switch (v) {
        case OfVerdict::RejectMac: return DropReason::Mac;
        case OfVerdict::RejectExpired: return DropReason::Expired;
        case OfVerdict::RejectWrongInterface: return DropReason::WrongInterface;
        case OfVerdict::Accept: break;
    }
    return DropReason::Malformed;
}

InterfaceId directional_egress(const OpaqueField& of, bool reversed) {
    return reversed ? of.ingress_if : of.egress_if;
}

}  // namespace

ForwardAction forward(const AsSecrets& secrets, const PacketHeader& header,
                      InterfaceId arrival_if,
                      const std::function<bool(InterfaceId)>& link_up,
                      std::int64_t now_us) {
    // A packet with no path is local to the AS.
    if (header.segments.empty()) return ActionDeliver{};

    auto pos = header.current();
    if (!pos) return ActionDrop{DropReason::Malformed};

    const HeaderSegment& seg = header.segments[pos->segment];
    const OpaqueField& of = seg.ofs[pos->of_index];

    OfVerdict verdict =
        verify_of(secrets.mac_secret, of, header.chain_prior(*pos), now_us,
                  seg.info.timestamp_s, arrival_if, seg.info.reversed);
    if (verdict != OfVerdict::Accept) return ActionDrop{map_reason(verdict)};

    bool at_segment_end = pos->of_index == seg.last_traversal();
    bool last_segment = pos->segment + 1 == header.segments.size();
    if (at_segment_end && last_segment) return ActionDeliver{};

    PacketHeader advanced = header;
    InterfaceId egress = 0;
    // Where this AS "stands" if it has to answer with a revocation: the OF
    // whose egress failed.
    PacketHeader::Position failure_pos = *pos;

    if (at_segment_end) {
        PacketHeader::Position next{pos->segment + 1,
                                    header.segments[pos->segment + 1].first_traversal()};
        advanced.set_position(next);
        if (seg.info.peering) {
            // The spliced link itself: exit over the peering interface; the
            // peer AS picks up the next segment's peering OF on arrival.
            egress = directional_egress(of, seg.info.reversed);
        } else {
            // Same-AS crossover: this AS owns an OF in both segments. Verify
            // the second one (no arrival check) and leave over its egress.
            const HeaderSegment& nseg = header.segments[next.segment];
            const OpaqueField& nof = nseg.ofs[next.of_index];
            OfVerdict v2 = verify_of(secrets.mac_secret, nof,
                                     advanced.chain_prior(next), now_us,
                                     nseg.info.timestamp_s, kNoInterface,
                                     nseg.info.reversed);
            if (v2 != OfVerdict::Accept) return ActionDrop{map_reason(v2)};
            if (next.of_index == nseg.last_traversal()) {
                if (next.segment + 1 == header.segments.size()) return ActionDeliver{};
                return ActionDrop{DropReason::Malformed};  // no double crossover
            }
            egress = directional_egress(nof, nseg.info.reversed);
            // The next AS reads its own OF, one past the crossover entry.
            advanced.set_position({next.segment, next.of_index + 1});
            failure_pos = next;
        }
    } else {
        egress = directional_egress(of, seg.info.reversed);
        advanced.set_position({pos->segment, pos->of_index + 1});
    }

    if (egress == kNoInterface) return ActionDrop{DropReason::Malformed};

    if (!link_up(egress)) {
        PacketHeader at_failure = header;
        at_failure.set_position(failure_pos);
        return ActionDropRevoke{egress, reverse_header(at_failure)};
    }
    return ActionForward{egress, std::move(advanced)};
}

}  // namespace scion
