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

#include <gtest/gtest.h>

#include <random>

#include "support/world.hpp"

using namespace scion;
using testsupport::as;
using testsupport::data_path;
using testsupport::make_down_segment;
using testsupport::TestWorld;

namespace {

constexpr std::int64_t kNow = 150ll * 1'000'000;

struct Walk {
    bool delivered = false;
    AsId at;
    std::vector<AsId> visited;
    DropReason drop_reason = DropReason::Malformed;
    bool revoked = false;
    PacketHeader revoke_path;
    int transit_addr_reads = 0;
};

// Steps a packet through routers until delivery or a drop. The liveness
// closure sees only each AS's own links.
Walk walk(const TestWorld& world, PacketHeader header, const AsId& src,
          const std::set<std::string>& dead_links = {}) {
    Walk result;
    AsId current = src;
    InterfaceId arrival = kNoInterface;
    result.visited.push_back(current);
    for (int step = 0; step < 64; ++step) {
        auto live = [&](InterfaceId ifid) {
            const Link* link = world.topo.find_link(current, ifid);
            return link && !dead_links.count(link->id());
        };
        int reads_before = header.addr_reads();
        ForwardAction action =
            forward(world.secrets.at(current), header, arrival, live, kNow);
        if (auto* fwd = std::get_if<ActionForward>(&action)) {
            result.transit_addr_reads += header.addr_reads() - reads_before;
            const Link* link = world.topo.find_link(current, fwd->egress_if);
            if (!link) {
                result.drop_reason = DropReason::Malformed;
                return result;
            }
            AsId next = link->other(current);
            arrival = link->if_of_other(current);
            current = next;
            result.visited.push_back(current);
            header = fwd->header;
            continue;
        }
        if (std::get_if<ActionDeliver>(&action)) {
            result.delivered = true;
            result.at = current;
            return result;
        }
        if (auto* drop = std::get_if<ActionDrop>(&action)) {
            result.at = current;
            result.drop_reason = drop->reason;
            return result;
        }
        auto& revoke = std::get<ActionDropRevoke>(action);
        result.at = current;
        result.drop_reason = DropReason::LinkDown;
        result.revoked = true;
        result.revoke_path = revoke.revoke_path;
        return result;
    }
    return result;
}

struct FigPaths {
    TestWorld world;
    std::vector<PathSegment> ups_b, ups_a, ups_x, ups_i;
    std::vector<PathSegment> downs_b, downs_c, downs_d, downs_i, downs_x;
    std::vector<PathSegment> cores;
};

FigPaths make_fig() {
    FigPaths fig{TestWorld::make(Topology::load_file(data_path("fig.topo"))),
                 {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
    TestWorld& w = fig.world;
    std::vector<PeerLinkSpec> x_peers{{as("1-15"), 9, 9}};
    std::vector<PeerLinkSpec> y_peers{{as("1-10"), 9, 9}};
    std::vector<PeerLinkSpec> d_peers{{as("2-10"), 9, 9}};
    std::vector<PeerLinkSpec> i_peers{{as("1-50"), 9, 9}};

    PathSegment d_b = make_down_segment(
        w, 1, {{"1-1", 0, 5}, {"1-10", 1, 5, x_peers}, {"1-30", 1, 0}});
    PathSegment d_c = make_down_segment(
        w, 1, {{"1-1", 0, 5}, {"1-10", 1, 6, x_peers}, {"1-40", 1, 0}});
    PathSegment d_a = make_down_segment(
        w, 1, {{"1-2", 0, 5}, {"1-15", 1, 5, y_peers}, {"1-20", 1, 0}});
    PathSegment d_d = make_down_segment(w, 1, {{"1-1", 0, 7}, {"1-50", 1, 0, d_peers}});
    PathSegment d_x = make_down_segment(w, 1, {{"1-1", 0, 5}, {"1-10", 1, 0, x_peers}});
    PathSegment d_i = make_down_segment(w, 2, {{"2-1", 0, 5}, {"2-10", 1, 0, i_peers}});

    fig.downs_b = {d_b};
    fig.downs_c = {d_c};
    fig.downs_d = {d_d};
    fig.downs_i = {d_i};
    fig.ups_b = {invert(d_b)};
    fig.ups_a = {invert(d_a)};
    fig.ups_x = {invert(d_x)};
    fig.ups_i = {invert(d_i)};
    fig.cores.push_back(segment_from_pcb(testsupport::make_chain(
        w, 1, SegmentKind::Core, {{"1-1", 0, 1}, {"1-2", 1, 0}})));
    fig.cores.push_back(segment_from_pcb(testsupport::make_chain(
        w, 2, SegmentKind::Core, {{"2-1", 0, 1}, {"1-2", 2, 0}})));
    return fig;
}

PacketHeader header_for(const EndToEndPath& path) {
    return encode_header(path, AddrType::None, {}, AddrType::None, {});
}

}  // namespace

TEST(Forward, ImmediatePathTraversesAndDelivers) {
    FigPaths fig = make_fig();
    auto paths = combine(fig.ups_b, fig.cores, fig.downs_d, as("1-30"), as("1-50"),
                         fig.world.topo);
    ASSERT_FALSE(paths.empty());
    Walk result = walk(fig.world, header_for(paths[0]), as("1-30"));
    EXPECT_TRUE(result.delivered);
    EXPECT_EQ(result.at, as("1-50"));
    EXPECT_EQ(result.visited, paths[0].as_sequence());
}

TEST(Forward, EveryCasePathDelivers) {
    FigPaths fig = make_fig();
    struct Case {
        std::vector<PathSegment>* ups;
        std::vector<PathSegment>* downs;
        AsId src, dst;
    };
    std::vector<Case> cases{
        {&fig.ups_b, &fig.downs_d, as("1-30"), as("1-50")},   // immediate
        {&fig.ups_b, &fig.downs_c, as("1-30"), as("1-40")},   // AS shortcut
        {&fig.ups_a, &fig.downs_b, as("1-20"), as("1-30")},   // peering shortcut
        {&fig.ups_a, &fig.downs_d, as("1-20"), as("1-50")},   // core combined
        {&fig.ups_a, &fig.downs_i, as("1-20"), as("2-10")},   // cross-ISD core
        {&fig.ups_i, &fig.downs_d, as("2-10"), as("1-50")},   // cross-ISD peering
        {&fig.ups_b, &fig.downs_x, as("1-30"), as("1-10")},   // dst on up-segment
    };
    for (const Case& c : cases) {
        auto paths = combine(*c.ups, fig.cores, *c.downs, c.src, c.dst, fig.world.topo);
        ASSERT_FALSE(paths.empty()) << c.src.to_string() << "->" << c.dst.to_string();
        for (const EndToEndPath& path : paths) {
            Walk result = walk(fig.world, header_for(path), c.src);
            EXPECT_TRUE(result.delivered)
                << c.src.to_string() << "->" << c.dst.to_string() << " case "
                << to_string(path.case_tag) << " dropped at " << result.at.to_string()
                << " (" << to_string(result.drop_reason) << ")";
            EXPECT_EQ(result.at, c.dst);
            EXPECT_EQ(result.visited, path.as_sequence());
        }
    }
}

TEST(Forward, ReplyTraversesReversedHeader) {
    FigPaths fig = make_fig();
    for (auto [ups, downs, src, dst] :
         {std::tuple{&fig.ups_a, &fig.downs_b, as("1-20"), as("1-30")},
          std::tuple{&fig.ups_b, &fig.downs_d, as("1-30"), as("1-50")},
          std::tuple{&fig.ups_a, &fig.downs_i, as("1-20"), as("2-10")}}) {
        auto paths = combine(*ups, fig.cores, *downs, src, dst, fig.world.topo);
        ASSERT_FALSE(paths.empty());
        Walk outbound = walk(fig.world, header_for(paths[0]), src);
        ASSERT_TRUE(outbound.delivered);

        // The destination inverts the header it received; no new lookup.
        PacketHeader request = header_for(paths[0]);
        Walk to_dst = walk(fig.world, request, src);
        ASSERT_TRUE(to_dst.delivered);
        // Rebuild the header exactly as it arrived, then reverse.
        PacketHeader arrived = header_for(paths[0]);
        {
            AsId current = src;
            InterfaceId arrival = kNoInterface;
            for (int i = 0; i < 64; ++i) {
                auto live = [&](InterfaceId ifid) {
                    return fig.world.topo.find_link(current, ifid) != nullptr;
                };
                ForwardAction action = forward(fig.world.secrets.at(current), arrived,
                                               arrival, live, kNow);
                auto* fwd = std::get_if<ActionForward>(&action);
                if (!fwd) break;
                const Link* link = fig.world.topo.find_link(current, fwd->egress_if);
                arrival = link->if_of_other(current);
                current = link->other(current);
                arrived = fwd->header;
            }
            ASSERT_EQ(current, dst);
        }
        Walk reply = walk(fig.world, reverse_header(arrived), dst);
        EXPECT_TRUE(reply.delivered) << "reply dropped at " << reply.at.to_string()
                                     << " (" << to_string(reply.drop_reason) << ")";
        EXPECT_EQ(reply.at, src);
    }
}

TEST(Forward, TransitNeverReadsAddresses) {
    FigPaths fig = make_fig();
    auto paths = combine(fig.ups_a, fig.cores, fig.downs_i, as("1-20"), as("2-10"),
                         fig.world.topo);
    ASSERT_FALSE(paths.empty());
    // A 4-byte source talking to a 16-byte destination.
    PacketHeader header = encode_header(paths[0], AddrType::Ipv4, {10, 0, 0, 1},
                                        AddrType::Ipv6, Bytes(16, 0xab));
    Walk result = walk(fig.world, header, as("1-20"));
    EXPECT_TRUE(result.delivered);
    EXPECT_EQ(result.transit_addr_reads, 0);
}

TEST(Forward, WrongArrivalInterfaceDropped) {
    FigPaths fig = make_fig();
    auto paths = combine(fig.ups_b, fig.cores, fig.downs_d, as("1-30"), as("1-50"),
                         fig.world.topo);
    ASSERT_FALSE(paths.empty());
    PacketHeader header = header_for(paths[0]);
    // Deliver the packet to 1-10 claiming arrival on interface 7 when the
    // path's OF names a different one.
    auto live = [](InterfaceId) { return true; };
    // First hop at the source succeeds and hands us the advanced header.
    ForwardAction first =
        forward(fig.world.secrets.at(as("1-30")), header, kNoInterface, live, kNow);
    auto* fwd = std::get_if<ActionForward>(&first);
    ASSERT_NE(fwd, nullptr);
    ForwardAction second =
        forward(fig.world.secrets.at(as("1-10")), fwd->header, 7, live, kNow);
    auto* drop = std::get_if<ActionDrop>(&second);
    ASSERT_NE(drop, nullptr);
    EXPECT_EQ(drop->reason, DropReason::WrongInterface);
}

TEST(Forward, TamperedOfDropsAtVerifier) {
    FigPaths fig = make_fig();
    auto paths = combine(fig.ups_b, fig.cores, fig.downs_d, as("1-30"), as("1-50"),
                         fig.world.topo);
    ASSERT_FALSE(paths.empty());

    // Corrupting a mid-path OF breaks the MAC chain of the hop below it:
    // the packet dies at the very first AS, before ever reaching 1-10.
    PacketHeader chained = header_for(paths[0]);
    chained.segments[0].ofs[1].expiry_units ^= 0x01;
    Walk early = walk(fig.world, chained, as("1-30"));
    EXPECT_FALSE(early.delivered);
    EXPECT_EQ(early.at, as("1-30"));
    EXPECT_EQ(early.drop_reason, DropReason::Mac);

    // Corrupting the terminal OF (nothing chains over it) is caught by its
    // owner.
    PacketHeader terminal = header_for(paths[0]);
    terminal.segments[1].ofs[1].mac ^= 0x1;
    Walk at_owner = walk(fig.world, terminal, as("1-30"));
    EXPECT_FALSE(at_owner.delivered);
    EXPECT_EQ(at_owner.at, as("1-50"));
    EXPECT_EQ(at_owner.drop_reason, DropReason::Mac);
}

TEST(Forward, ExpiredPathDropped) {
    FigPaths fig = make_fig();
    auto paths = combine(fig.ups_b, fig.cores, fig.downs_d, as("1-30"), as("1-50"),
                         fig.world.topo);
    ASSERT_FALSE(paths.empty());
    PacketHeader header = header_for(paths[0]);
    auto live = [](InterfaceId) { return true; };
    std::int64_t after_expiry = (100 + 169 * 256 + 1) * 1'000'000ll;
    ForwardAction action = forward(fig.world.secrets.at(as("1-30")), header,
                                   kNoInterface, live, after_expiry);
    auto* drop = std::get_if<ActionDrop>(&action);
    ASSERT_NE(drop, nullptr);
    EXPECT_EQ(drop->reason, DropReason::Expired);
}

TEST(Forward, DeadLinkEmitsRevocationTowardSource) {
    FigPaths fig = make_fig();
    auto paths = combine(fig.ups_b, fig.cores, fig.downs_d, as("1-30"), as("1-50"),
                         fig.world.topo);
    ASSERT_FALSE(paths.empty());
    // Kill the core-to-destination link; the packet dies at 1-1.
    Walk result = walk(fig.world, header_for(paths[0]), as("1-30"),
                       {fig.world.topo.find_link(as("1-1"), 7)->id()});
    EXPECT_FALSE(result.delivered);
    EXPECT_TRUE(result.revoked);
    EXPECT_EQ(result.at, as("1-1"));

    // The attached reverse path routes the revocation back to the source.
    Walk back = walk(fig.world, result.revoke_path, as("1-1"),
                     {fig.world.topo.find_link(as("1-1"), 7)->id()});
    EXPECT_TRUE(back.delivered);
    EXPECT_EQ(back.at, as("1-30"));
}

TEST(Forward, RandomMacForgeriesNeverPassTheFirstHonestAs) {
    FigPaths fig = make_fig();
    std::mt19937_64 rng(2025);
    // Headers structurally identical to a real 1-30 -> 1-50 path, MACs
    // random. 1-10 is the first honest AS after the malicious source.
    auto paths = combine(fig.ups_b, fig.cores, fig.downs_d, as("1-30"), as("1-50"),
                         fig.world.topo);
    ASSERT_FALSE(paths.empty());
    int passed = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        PacketHeader header = header_for(paths[0]);
        for (HeaderSegment& seg : header.segments)
            for (OpaqueField& of : seg.ofs)
                of.mac = static_cast<std::uint32_t>(rng() & 0xffffff);
        // Injected on the wire directly to 1-10 (the adversary controls its
        // own AS and skips its own hop).
        header.set_position({0, 1});
        auto live = [](InterfaceId) { return true; };
        ForwardAction action =
            forward(fig.world.secrets.at(as("1-10")), header, 5, live, kNow);
        if (std::get_if<ActionForward>(&action)) ++passed;
    }
    EXPECT_EQ(passed, 0);
}

TEST(Forward, EmptyPathDeliversLocally) {
    FigPaths fig = make_fig();
    EndToEndPath degenerate;
    degenerate.src = as("1-30");
    degenerate.dst = as("1-30");
    PacketHeader header = header_for(degenerate);
    auto live = [](InterfaceId) { return true; };
    ForwardAction action =
        forward(fig.world.secrets.at(as("1-30")), header, kNoInterface, live, kNow);
    EXPECT_NE(std::get_if<ActionDeliver>(&action), nullptr);
}
