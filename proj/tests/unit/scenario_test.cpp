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

#include "scion/sim/scenario.hpp"

#include <gtest/gtest.h>

#include "support/world.hpp"

using namespace scion;
using namespace scion::sim;
using testsupport::as;

TEST(Scenario, ParsesFullGrammar) {
    Scenario sc = Scenario::parse(
        "# comment\n"
        "topology fig.topo\n"
        "seed 42\n"
        "duration 300\n"
        "option cache off\n"
        "option link-latency-ms 20\n"
        "policy k-intra 7\n"
        "policy weights 0.4 0.3 0.2 0.1\n"
        "policy of-expiry-units 2\n"
        "trc-config 1 roots=5 cert-quorum=3 trc-quorum=5\n"
        "at 10 fail-link 1-1:5~1-10:1 restore 50\n"
        "at 20 attack FORGE_OF 1-30 1-50 1000\n"
        "at 30 attack FORGE_SCMP 1-30 1-10:5\n"
        "at 40 trc-update 1 version=2;signers=4;rotate=0,1\n"
        "flow 1-30/1 1-50 rate 10 paths 2 start 35 until 95\n",
        "/base");
    EXPECT_EQ(sc.topology_path, "/base/fig.topo");
    EXPECT_EQ(sc.seed, 42u);
    EXPECT_EQ(sc.duration_us, 300 * kSecond);
    EXPECT_FALSE(sc.options.cache_enabled);
    EXPECT_EQ(sc.options.link_latency_us, 20'000);
    EXPECT_EQ(sc.options.policy.k_intra, 7u);
    EXPECT_EQ(sc.options.policy.expiry_units, 2);
    EXPECT_EQ(sc.options.trc_config(1).roots, 5);
    EXPECT_EQ(sc.options.trc_config(2).roots, 4);  // default elsewhere

    ASSERT_EQ(sc.directives.size(), 4u);
    auto& fail = std::get<FailLinkDirective>(sc.directives[0].action);
    EXPECT_EQ(fail.link_id, "1-1:5~1-10:1");
    EXPECT_EQ(fail.restore_at, 50 * kSecond);
    auto& forge = std::get<AttackDirective>(sc.directives[1].action);
    EXPECT_EQ(forge.kind, AttackKind::ForgeOf);
    EXPECT_EQ(forge.count, 1000u);
    auto& scmp = std::get<AttackDirective>(sc.directives[2].action);
    EXPECT_EQ(scmp.target_as, as("1-10"));
    EXPECT_EQ(scmp.target_if, 5);
    auto& trc = std::get<TrcUpdateDirective>(sc.directives[3].action);
    EXPECT_EQ(trc.version, 2u);
    EXPECT_EQ(trc.signer_count, 4);
    EXPECT_EQ(trc.rotate, (std::vector<std::uint16_t>{0, 1}));

    ASSERT_EQ(sc.flows.size(), 1u);
    EXPECT_EQ(sc.flows[0].src_as, as("1-30"));
    EXPECT_EQ(sc.flows[0].src_host, 1u);
    EXPECT_DOUBLE_EQ(sc.flows[0].rate_pps, 10.0);
    EXPECT_EQ(sc.flows[0].path_degree, 2u);
    EXPECT_EQ(sc.flows[0].start_us, 35 * kSecond);
    EXPECT_EQ(sc.flows[0].until_us, 95 * kSecond);
}

TEST(Scenario, ErrorsNameTheLine) {
    try {
        Scenario::parse("duration 10\nat 5 explode 1-1\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    try {
        Scenario::parse("duration 10\npolicy weights 0.9 0.3 0.2 0.1\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
    }
    EXPECT_THROW(Scenario::parse("duration -3\n"), ParseError);
    EXPECT_THROW(Scenario::parse("duration 10\nflow 1-30 1-50 rate 10 paths 2\n"),
                 ParseError);
    EXPECT_THROW(Scenario::parse("duration 10\nat x fail-link a\n"), ParseError);
    EXPECT_THROW(Scenario::parse("duration 10\nat 5 attack FORGE_OF 1-1\n"), ParseError);
    EXPECT_THROW(Scenario::parse("duration 10\ntrc-config 1 roots=2 trc-quorum=4\n"),
                 ParseError);
}

TEST(Scenario, KInfinityDisablesTruncation) {
    Scenario sc = Scenario::parse("duration 1\npolicy k-intra inf\npolicy k-inter inf\n");
    EXPECT_EQ(sc.options.policy.k_intra, 0u);
    EXPECT_EQ(sc.options.policy.k_inter, 0u);
}

TEST(Scenario, DefaultsMatchBeaconingParameters) {
    Scenario sc = Scenario::parse("duration 1\n");
    EXPECT_EQ(sc.options.policy.k_intra, 5u);
    EXPECT_EQ(sc.options.policy.interval_intra_us, 15 * kSecond);
    EXPECT_EQ(sc.options.policy.k_inter, 3u);
    EXPECT_EQ(sc.options.policy.interval_inter_us, 60 * kSecond);
    EXPECT_DOUBLE_EQ(sc.options.policy.w_len, 0.4);
    EXPECT_DOUBLE_EQ(sc.options.policy.w_disjoint, 0.3);
    EXPECT_DOUBLE_EQ(sc.options.policy.w_fresh, 0.2);
    EXPECT_DOUBLE_EQ(sc.options.policy.w_consistency, 0.1);
    EXPECT_TRUE(sc.options.cache_enabled);
    EXPECT_EQ(sc.options.link_latency_us, 10'000);
    EXPECT_EQ(sc.options.default_trc.quorum_cert, 2);
    EXPECT_EQ(sc.options.default_trc.quorum_trc, 4);
}
