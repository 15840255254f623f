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

#include "scion/combine.hpp"

#include <gtest/gtest.h>

#include "support/world.hpp"

using namespace scion;
using testsupport::as;
using testsupport::data_path;
using testsupport::make_down_segment;
using testsupport::TestWorld;

namespace {

struct FigSegments {
    TestWorld world;
    std::vector<PathSegment> up_b, up_a, up_x, up_i;
    std::vector<PathSegment> down_b, down_c, down_d, down_i;
    std::vector<PathSegment> cores;
};

FigSegments make_fig() {
    FigSegments fig{TestWorld::make(Topology::load_file(data_path("fig.topo"))),
                    {}, {}, {}, {}, {}, {}, {}, {}, {}};
    TestWorld& w = fig.world;
    std::vector<PeerLinkSpec> x_peers{{as("1-15"), 9, 9}};
    std::vector<PeerLinkSpec> y_peers{{as("1-10"), 9, 9}};
    std::vector<PeerLinkSpec> d_peers{{as("2-10"), 9, 9}};
    std::vector<PeerLinkSpec> i_peers{{as("1-50"), 9, 9}};

    // Beacons as the control plane would produce them.
    PathSegment d_b = make_down_segment(
        w, 1, {{"1-1", 0, 5}, {"1-10", 1, 5, x_peers}, {"1-30", 1, 0}});
    PathSegment d_c = make_down_segment(
        w, 1, {{"1-1", 0, 5}, {"1-10", 1, 6, x_peers}, {"1-40", 1, 0}});
    PathSegment d_a =
        make_down_segment(w, 1, {{"1-2", 0, 5}, {"1-15", 1, 5, y_peers}, {"1-20", 1, 0}});
    PathSegment d_d = make_down_segment(w, 1, {{"1-1", 0, 7}, {"1-50", 1, 0, d_peers}});
    PathSegment d_x = make_down_segment(w, 1, {{"1-1", 0, 5}, {"1-10", 1, 0, x_peers}});
    PathSegment d_i = make_down_segment(w, 2, {{"2-1", 0, 5}, {"2-10", 1, 0, i_peers}});

    fig.down_b = {d_b};
    fig.down_c = {d_c};
    fig.down_d = {d_d};
    fig.down_i = {d_i};
    fig.up_b = {invert(d_b)};
    fig.up_a = {invert(d_a)};
    fig.up_x = {invert(d_x)};
    fig.up_i = {invert(d_i)};

    // Core segments: 1-1 -> 1-2 and 2-1 -> 1-2 in beacon order.
    fig.cores.push_back(segment_from_pcb(
        testsupport::make_chain(w, 1, SegmentKind::Core, {{"1-1", 0, 1}, {"1-2", 1, 0}})));
    fig.cores.push_back(segment_from_pcb(
        testsupport::make_chain(w, 2, SegmentKind::Core, {{"2-1", 0, 1}, {"1-2", 2, 0}})));
    return fig;
}

std::vector<AsId> seq(const std::vector<std::string>& ids) {
    std::vector<AsId> out;
    for (const auto& s : ids) out.push_back(as(s));
    return out;
}

}  // namespace

TEST(Combine, ImmediateCombination) {
    FigSegments fig = make_fig();
    auto paths = combine(fig.up_b, fig.cores, fig.down_d, as("1-30"), as("1-50"),
                         fig.world.topo);
    ASSERT_FALSE(paths.empty());
    EXPECT_EQ(paths[0].case_tag, PathCase::Immediate);
    EXPECT_EQ(paths[0].as_sequence(), seq({"1-30", "1-10", "1-1", "1-50"}));
    EXPECT_EQ(paths[0].hop_count(), 3u);
    for (const auto& p : paths)
        EXPECT_FALSE(check_path_validity(p, fig.world.topo).has_value());
}

TEST(Combine, AsShortcutBeatsLoopingImmediate) {
    FigSegments fig = make_fig();
    auto paths = combine(fig.up_b, fig.cores, fig.down_c, as("1-30"), as("1-40"),
                         fig.world.topo);
    ASSERT_FALSE(paths.empty());
    EXPECT_EQ(paths[0].case_tag, PathCase::AsShortcut);
    EXPECT_EQ(paths[0].as_sequence(), seq({"1-30", "1-10", "1-40"}));
    EXPECT_EQ(paths[0].hop_count(), 2u);
    // The immediate combination would revisit 1-10 and is never emitted.
    for (const auto& p : paths) EXPECT_NE(p.case_tag, PathCase::Immediate);
    // Strictly shorter than the four-hop detour through the core.
    EXPECT_LT(paths[0].hop_count(), 4u);
}

TEST(Combine, PeeringShortcutRankedAboveCoreCombination) {
    FigSegments fig = make_fig();
    auto paths = combine(fig.up_a, fig.cores, fig.down_b, as("1-20"), as("1-30"),
                         fig.world.topo);
    ASSERT_GE(paths.size(), 2u);
    EXPECT_EQ(paths[0].case_tag, PathCase::PeeringShortcut);
    EXPECT_EQ(paths[0].as_sequence(), seq({"1-20", "1-15", "1-10", "1-30"}));
    EXPECT_EQ(paths[0].hop_count(), 3u);
    EXPECT_EQ(paths[1].case_tag, PathCase::CoreCombined);
    EXPECT_EQ(paths[1].as_sequence(), seq({"1-20", "1-15", "1-2", "1-1", "1-10", "1-30"}));
    EXPECT_LT(paths[0].hop_count(), paths[1].hop_count());
}

TEST(Combine, CoreCombinationWithinIsd) {
    FigSegments fig = make_fig();
    auto paths = combine(fig.up_a, fig.cores, fig.down_d, as("1-20"), as("1-50"),
                         fig.world.topo);
    ASSERT_FALSE(paths.empty());
    EXPECT_EQ(paths[0].case_tag, PathCase::CoreCombined);
    EXPECT_EQ(paths[0].as_sequence(), seq({"1-20", "1-15", "1-2", "1-1", "1-50"}));
}

TEST(Combine, CoreCombinationAcrossIsds) {
    FigSegments fig = make_fig();
    auto paths = combine(fig.up_a, fig.cores, fig.down_i, as("1-20"), as("2-10"),
                         fig.world.topo);
    ASSERT_FALSE(paths.empty());
    EXPECT_EQ(paths[0].case_tag, PathCase::CoreCombined);
    EXPECT_EQ(paths[0].as_sequence(), seq({"1-20", "1-15", "1-2", "2-1", "2-10"}));
    EXPECT_EQ(paths[0].isds_traversed, (std::set<IsdId>{1, 2}));
}

TEST(Combine, CrossIsdPeeringShortcut) {
    FigSegments fig = make_fig();
    auto paths = combine(fig.up_i, fig.cores, fig.down_d, as("2-10"), as("1-50"),
                         fig.world.topo);
    ASSERT_FALSE(paths.empty());
    EXPECT_EQ(paths[0].case_tag, PathCase::PeeringShortcut);
    EXPECT_EQ(paths[0].as_sequence(), seq({"2-10", "1-50"}));
    EXPECT_EQ(paths[0].hop_count(), 1u);
    EXPECT_EQ(paths[0].isds_traversed, (std::set<IsdId>{1, 2}));
}

TEST(Combine, DestinationOnUpSegment) {
    FigSegments fig = make_fig();
    // 1-10 lies on B's up-segment: the path truncates in place.
    auto paths =
        combine(fig.up_b, fig.cores, {}, as("1-30"), as("1-10"), fig.world.topo);
    ASSERT_FALSE(paths.empty());
    EXPECT_EQ(paths[0].case_tag, PathCase::AsShortcut);
    EXPECT_EQ(paths[0].as_sequence(), seq({"1-30", "1-10"}));
    EXPECT_EQ(paths[0].slices.size(), 1u);
}

TEST(Combine, SourceEqualsDestination) {
    FigSegments fig = make_fig();
    auto paths =
        combine(fig.up_b, fig.cores, fig.down_b, as("1-30"), as("1-30"), fig.world.topo);
    ASSERT_EQ(paths.size(), 1u);
    EXPECT_EQ(paths[0].hop_count(), 0u);
    EXPECT_EQ(paths[0].as_sequence(), seq({"1-30"}));
    EXPECT_TRUE(paths[0].slices.empty());
}

TEST(Combine, NoCombinationGivesEmptyList) {
    FigSegments fig = make_fig();
    // No core segment reaches ISD 4 in this input set.
    PathSegment d_j = make_down_segment(fig.world, 4, {{"4-1", 0, 5}, {"4-10", 1, 0}});
    auto paths =
        combine(fig.up_b, fig.cores, {d_j}, as("1-30"), as("4-10"), fig.world.topo);
    EXPECT_TRUE(paths.empty());
}

TEST(Combine, DeterministicTotalOrder) {
    FigSegments fig = make_fig();
    auto first = combine(fig.up_a, fig.cores, fig.down_b, as("1-20"), as("1-30"),
                         fig.world.topo);
    auto second = combine(fig.up_a, fig.cores, fig.down_b, as("1-20"), as("1-30"),
                          fig.world.topo);
    ASSERT_EQ(first.size(), second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        EXPECT_EQ(first[i].case_tag, second[i].case_tag);
        EXPECT_EQ(first[i].as_sequence(), second[i].as_sequence());
    }
}

TEST(Oracle, LineTopology) {
    Topology topo = Topology::load_file(data_path("fanin1.topo"));
    // Only the descending path exists from 1-10 to 1-20.
    EXPECT_EQ(enumerate_oracle(topo, as("1-10"), as("1-20")),
              (std::set<std::vector<AsId>>{seq({"1-10", "1-20"})}));
    EXPECT_EQ(enumerate_oracle(topo, as("1-20"), as("1-10")),
              (std::set<std::vector<AsId>>{seq({"1-20", "1-10"})}));
    EXPECT_EQ(enumerate_oracle(topo, as("1-20"), as("1-20")),
              (std::set<std::vector<AsId>>{seq({"1-20"})}));
}

TEST(Oracle, ValleyFreedomEnforced) {
    Topology topo = Topology::load_file(data_path("fig.topo"));
    // 1-30 to 1-40: through the common provider, or up to the core and back
    // down over the other parallel link; never down-then-up.
    auto sequences = enumerate_oracle(topo, as("1-30"), as("1-40"));
    EXPECT_TRUE(sequences.count(seq({"1-30", "1-10", "1-40"})));
    for (const auto& s : sequences) {
        // No sequence descends to a customer and ascends again.
        bool descended = false;
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
            const Link* link = nullptr;
            for (const Link& l : topo.links()) {
                if ((l.a == s[i] && l.b == s[i + 1]) || (l.b == s[i] && l.a == s[i + 1]))
                    link = &l;
            }
            ASSERT_NE(link, nullptr);
            if (link->kind == LinkType::ProviderToCustomer) {
                if (link->a == s[i]) descended = true;       // going down
                else EXPECT_FALSE(descended) << "valley in path";
            }
        }
    }
}

TEST(Combine, OutputSequencesAreValleyFree) {
    FigSegments fig = make_fig();
    struct Case {
        const std::vector<PathSegment>& ups;
        const std::vector<PathSegment>& downs;
        AsId src, dst;
    };
    std::vector<Case> cases{
        {fig.up_b, fig.down_d, as("1-30"), as("1-50")},
        {fig.up_b, fig.down_c, as("1-30"), as("1-40")},
        {fig.up_a, fig.down_b, as("1-20"), as("1-30")},
        {fig.up_a, fig.down_d, as("1-20"), as("1-50")},
        {fig.up_a, fig.down_i, as("1-20"), as("2-10")},
        {fig.up_i, fig.down_d, as("2-10"), as("1-50")},
    };
    for (const Case& c : cases) {
        auto oracle = enumerate_oracle(fig.world.topo, c.src, c.dst);
        for (const EndToEndPath& p :
             combine(c.ups, fig.cores, c.downs, c.src, c.dst, fig.world.topo)) {
            EXPECT_TRUE(oracle.count(p.as_sequence()))
                << "path " << p.as_sequence().size() << " hops from "
                << c.src.to_string() << " not produced by the oracle";
        }
    }
}

TEST(Combine, PeeringRequiresSameLinkOnBothSides) {
    FigSegments fig = make_fig();
    // B -> C: both segments announce the peering link from the same endpoint
    // (1-10), which cannot be spliced.
    auto paths = combine(fig.up_b, fig.cores, fig.down_c, as("1-30"), as("1-40"),
                         fig.world.topo);
    for (const auto& p : paths) EXPECT_NE(p.case_tag, PathCase::PeeringShortcut);
}
