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
//
// End-to-end acceptance checks. Each test prints one PASS/FAIL line; the
// whole suite is the release gate.

#include <gtest/gtest.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <random>

#include "scion/forward.hpp"
#include "scion/packet.hpp"
#include "scion/sim/engine.hpp"
#include "support/world.hpp"

using namespace scion;
using namespace scion::sim;
using testsupport::as;
using testsupport::data_path;

namespace {

struct Gate {
    const char* number;
    const char* name;
    bool ok = true;
    ~Gate() {
        std::printf("ACCEPTANCE %s %s: %s\n", number, name, ok ? "PASS" : "FAIL");
        std::fflush(stdout);
    }
};

#define GATE_CHECK(gate, expr)            \
    do {                                  \
        bool gate_ok_ = (expr);           \
        if (!gate_ok_) (gate).ok = false; \
        EXPECT_TRUE(gate_ok_) << #expr;   \
    } while (0)

struct CommandResult {
    int exit_code = -1;
    std::string output;
    double wall_seconds = 0;
};

CommandResult run_cli(const std::string& args) {
    std::string command = std::string(SCIONSIM_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 4096> buffer{};
    CommandResult result;
    auto start = std::chrono::steady_clock::now();
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) return result;
    while (std::size_t n = fread(buffer.data(), 1, buffer.size(), pipe))
        result.output.append(buffer.data(), n);
    int status = pclose(pipe);
    result.exit_code = WEXITSTATUS(status);
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

Scenario scenario_text(const std::string& text) {
    return Scenario::parse(text, std::string(TEST_DATA_DIR));
}

std::string first_case_tag(const std::string& cli_output) {
    auto space = cli_output.find(' ');
    if (space == std::string::npos) return cli_output;
    return cli_output.substr(0, space);
}

}  // namespace

// Criterion 1: the four combination cases appear on the canonical world,
// each as the top-ranked path of its source/destination pair, in under a
// second of wall time per query.
TEST(Acceptance, C01FourCaseReproduction) {
    Gate gate{"1", "four-case-reproduction"};
    struct Expected {
        const char* from;
        const char* to;
        const char* tag;
    };
    const Expected cases[] = {
        {"1-30", "1-50", "IMMEDIATE"},
        {"1-30", "1-40", "AS_SHORTCUT"},
        {"1-20", "1-30", "PEERING_SHORTCUT"},
        {"1-20", "1-50", "CORE_COMBINED"},
        {"1-20", "2-10", "CORE_COMBINED"},  // across ISDs
    };
    for (const Expected& c : cases) {
        CommandResult result =
            run_cli("paths --topo " + data_path("fig.topo") + " --from " + c.from +
                    " --to " + c.to + " --after 40");
        GATE_CHECK(gate, result.exit_code == 0);
        GATE_CHECK(gate, first_case_tag(result.output) == c.tag);
        GATE_CHECK(gate, result.wall_seconds < 1.0);
    }
}

// Criterion 2: per provider-to-customer link and warm 15 s interval the
// emitted beacon count is exactly min(pool size, 5), whatever the fan-in.
TEST(Acceptance, C02BeaconRateInvariant) {
    Gate gate{"2", "beacon-rate-invariant"};
    for (const char* topo : {"fanin1.topo", "fanin8.topo"}) {
        SimEngine engine(scenario_text("topology " + std::string(topo) +
                                       "\nseed 21\nduration 200\n"));
        Metrics& m = engine.run();
        int violations = 0;
        for (const Link& link : engine.topology().links()) {
            if (link.kind != LinkType::ProviderToCustomer) continue;
            bool sender_is_core = engine.topology().as_node(link.a).is_core();
            for (int iv = 2; iv <= 11; ++iv) {
                std::int64_t emitted =
                    m.get("pcb.sent.link." + link.id() + ".iv" + std::to_string(iv));
                std::int64_t expected;
                if (sender_is_core) {
                    expected = 1;  // one fresh origination per interval
                } else {
                    std::int64_t pool = m.get("pool.size." + link.a.to_string() +
                                              ".iv" + std::to_string(iv));
                    expected = std::min<std::int64_t>(pool, 5);
                }
                if (emitted != expected) {
                    ++violations;
                    ADD_FAILURE() << topo << " " << link.id() << " iv" << iv
                                  << ": emitted " << emitted << " expected "
                                  << expected;
                }
            }
        }
        GATE_CHECK(gate, violations == 0);
    }
}

// Criterion 3: with truncation disabled, the beacon pools reach exactly the
// set of loop-free provider-chain paths on 100 seeded random topologies.
TEST(Acceptance, C03PathDiscoveryCompleteness) {
    Gate gate{"3", "path-discovery-completeness"};
    auto start = std::chrono::steady_clock::now();

    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        std::mt19937_64 rng(seed * 7919);
        int n = 3 + static_cast<int>(rng() % 10);  // 3..12 ASes
        int cores = n >= 6 && rng() % 2 ? 2 : 1;

        std::string text = "isd 1\n";
        std::vector<AsId> ids;
        std::map<AsId, InterfaceId> next_if;
        for (int i = 0; i < n; ++i) {
            AsId id{1, static_cast<std::uint32_t>(i + 1)};
            ids.push_back(id);
            text += "as " + id.to_string() + (i < cores ? " core=1" : "") + "\n";
        }
        std::vector<std::pair<AsId, AsId>> edges;
        for (int i = cores; i < n; ++i) {
            int providers = 1 + static_cast<int>(rng() % 2);
            std::set<int> chosen;
            for (int p = 0; p < providers; ++p) chosen.insert(static_cast<int>(rng() % i));
            for (int p : chosen) {
                text += "link " + ids[p].to_string() + " " +
                        std::to_string(++next_if[ids[p]]) + " " + ids[i].to_string() +
                        " " + std::to_string(++next_if[ids[i]]) + " P2C\n";
                edges.emplace_back(ids[p], ids[i]);
                if (rng() % 4 == 0) {  // occasional parallel link
                    text += "link " + ids[p].to_string() + " " +
                            std::to_string(++next_if[ids[p]]) + " " +
                            ids[i].to_string() + " " +
                            std::to_string(++next_if[ids[i]]) + " P2C\n";
                }
            }
        }
        if (cores == 2) text += "link 1-1 4000 1-2 4000 CORE\n";

        // Independent oracle: every provider-chain path from a core, by
        // exhaustive enumeration over the generated edge list.
        std::map<AsId, std::set<std::vector<AsId>>> expected;
        std::map<AsId, std::vector<AsId>> customers;
        for (const auto& [p, c] : edges) customers[p].push_back(c);
        int depth = 0;
        std::function<void(const AsId&, std::vector<AsId>&)> dfs =
            [&](const AsId& at, std::vector<AsId>& path) {
                depth = std::max(depth, static_cast<int>(path.size()) - 1);
                if (path.size() > 1) expected[at].insert(path);
                for (const AsId& next : customers[at]) {
                    path.push_back(next);
                    dfs(next, path);
                    path.pop_back();
                }
            };
        for (int c = 0; c < cores; ++c) {
            std::vector<AsId> path{ids[static_cast<std::size_t>(c)]};
            dfs(ids[static_cast<std::size_t>(c)], path);
        }

        Scenario scenario;
        scenario.topology = Topology::parse(text);
        scenario.seed = seed;
        scenario.duration_us = static_cast<SimTime>(depth) * 15 * kSecond + kSecond;
        scenario.options.policy.k_intra = 0;  // truncation disabled
        SimEngine engine(std::move(scenario));
        engine.run();

        for (const AsId& id : ids) {
            std::set<std::vector<AsId>> actual;
            BeaconPolicy unlimited;
            unlimited.k_intra = 0;
            for (const PoolEntry* entry :
                 engine.as_runtime(id).pool.candidates(SegmentKind::Up, engine.now(),
                                                       unlimited)) {
                std::vector<AsId> sequence = entry->pcb.as_sequence();
                sequence.push_back(id);
                actual.insert(std::move(sequence));
            }
            if (actual != expected[id]) {
                gate.ok = false;
                ADD_FAILURE() << "seed " << seed << " as " << id.to_string() << ": "
                              << actual.size() << " pooled vs " << expected[id].size()
                              << " enumerated";
            }
        }
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    GATE_CHECK(gate, elapsed < 60.0);
}

// Criterion 4: every one of the 64 single-bit corruptions of a valid OF is
// rejected, and 100000 random-MAC packets never make it past the first
// honest AS.
TEST(Acceptance, C04OfTamperRejection) {
    Gate gate{"4", "of-tamper-rejection"};

    SymKey key{};
    key.fill(0x5e);
    OpaqueField prior = build_of(key, 0, 169, 1, 2, nullptr);
    OpaqueField of = build_of(key, 0, 169, 7, 9, &prior);
    GATE_CHECK(gate, verify_of(key, of, &prior, 0, 0, 7, false) == OfVerdict::Accept);
    int rejected = 0;
    for (int bit = 0; bit < 64; ++bit) {
        auto bytes = of.encode();
        bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        OpaqueField tampered = OpaqueField::decode(bytes);
        if (verify_of(key, tampered, &prior, 0, 0, tampered.ingress_if, false) !=
            OfVerdict::Accept)
            ++rejected;
    }
    GATE_CHECK(gate, rejected == 64);

    SimEngine engine(scenario_text(
        "topology fig.topo\nseed 24\nduration 40\n"
        "at 31 attack FORGE_OF 1-30 1-50 100000\n"));
    Metrics& m = engine.run();
    GATE_CHECK(gate, m.get("attack.forged_of.sent") == 100000);
    GATE_CHECK(gate, m.get("attack.forged_of.traversed") == 0);
}

// Criterion 5: a 2-segment path visiting 4 hop entries encodes a path region
// of exactly 48 bytes.
TEST(Acceptance, C05HeaderOverhead) {
    Gate gate{"5", "header-overhead"};
    SimEngine engine(scenario_text("topology fig.topo\nseed 25\nduration 40\n"));
    engine.run();
    auto paths = engine.query_paths(as("1-10"), as("1-50"));
    GATE_CHECK(gate, !paths.empty());
    if (!paths.empty()) {
        GATE_CHECK(gate, paths[0].case_tag == PathCase::Immediate);
        GATE_CHECK(gate, paths[0].slices.size() == 2);
        GATE_CHECK(gate, paths[0].of_count() == 4);
        GATE_CHECK(gate, paths[0].path_region_bytes() == 48);
        PacketHeader header =
            encode_header(paths[0], AddrType::None, {}, AddrType::None, {});
        GATE_CHECK(gate, header.path_region_bytes() == 48);
    }
}

// Criterion 6: two disjoint paths, one mid-flow link failure: the delivery
// gap stays within one second and at least 99% of the packets arrive.
TEST(Acceptance, C06FailoverMasking) {
    Gate gate{"6", "failover-masking"};
    SimEngine engine(scenario_text(
        "topology diamond.topo\nseed 26\nduration 120\n"
        "flow 1-50/1 1-60 rate 10 paths 2 start 40 until 100\n"
        "at 70 fail-link 1-1:6~1-30:1\n"));
    Metrics& m = engine.run();
    std::int64_t sent = m.get("flow.0.sent");
    std::int64_t delivered = m.get("flow.0.delivered");
    GATE_CHECK(gate, sent >= 590);  // 60 s at 10 pps
    GATE_CHECK(gate, m.get("flow.0.switchovers") >= 1);
    GATE_CHECK(gate, m.get("flow.0.gap_max_us") <= 1'000'000);
    GATE_CHECK(gate, delivered * 100 >= sent * 99);
}

// Criterion 7: one beacon interval plus two message latencies after an
// authenticated revocation, no path server anywhere returns a segment over
// the revoked interface; forged revocations purge exactly nothing.
TEST(Acceptance, C07RevocationCompleteness) {
    Gate gate{"7", "revocation-completeness"};
    // Failure at 70 s; the flow probes it within 100 ms; stores checked at
    // 86 s > 70.2 + 15 + 2 * 0.011.
    SimEngine engine(scenario_text(
        "topology diamond.topo\nseed 27\nduration 86\n"
        "flow 1-50/1 1-60 rate 10 paths 2 start 40\n"
        "at 70 fail-link 1-1:6~1-30:1\n"));
    Metrics& m = engine.run();
    GATE_CHECK(gate, m.get("revocation.processed") > 0);

    auto offending = [&](const SegmentStore& store) {
        for (const PathSegment* seg : store.all()) {
            if (engine.now() >= seg->expiry_us()) continue;
            if (seg->uses_interface(as("1-1"), 6)) return true;
        }
        return false;
    };
    for (const auto& [id, rt] : engine.all_ases()) {
        GATE_CHECK(gate, !offending(rt.up_store));
        for (const auto& [dst, cached] : rt.lookup_cache) {
            for (const auto* list :
                 {&cached.reply.up, &cached.reply.core, &cached.reply.down}) {
                for (const PathSegment& seg : *list)
                    GATE_CHECK(gate, !seg.uses_interface(as("1-1"), 6));
            }
        }
    }
    for (IsdId isd : engine.topology().isds()) {
        GATE_CHECK(gate, !offending(engine.core_ps(isd).down_store));
        GATE_CHECK(gate, !offending(engine.core_ps(isd).core_store));
    }

    // Forged revocations: tag forged for a healthy interface.
    SimEngine forged(scenario_text(
        "topology fig.topo\nseed 28\nduration 80\n"
        "at 50 attack FORGE_SCMP 1-40 1-10:5\n"));
    Metrics& fm = forged.run();
    GATE_CHECK(gate, fm.get("attack.forge_scmp.sent") > 0);
    GATE_CHECK(gate, fm.get("revocation.purged") == 0);
    GATE_CHECK(gate, fm.get("scmp.bad_proof") > 0);
}

// Criterion 8: a quorum-valid TRC update in a depth-3 ISD reaches every
// member within 45 s plus three message latencies; an under-quorum update
// reaches nobody.
TEST(Acceptance, C08TrcPropagation) {
    Gate gate{"8", "trc-propagation"};
    SimEngine engine(scenario_text(
        "topology chain3.topo\nseed 29\nduration 120\n"
        "at 20 trc-update 1 version=2;signers=4\n"));
    Metrics& m = engine.run();
    GATE_CHECK(gate, m.get("trc.update.accepted") == 1);
    for (const auto& [id, rt] : engine.all_ases())
        GATE_CHECK(gate, rt.trcs.current_version(1) == 2u);
    std::int64_t propagated = m.get("trc.propagated_us.isd1.v2");
    GATE_CHECK(gate, propagated > 0);
    GATE_CHECK(gate, propagated <= 45 * kSecond + 3 * 11'000);

    SimEngine underquorum(scenario_text(
        "topology chain3.topo\nseed 30\nduration 120\n"
        "at 20 trc-update 1 version=2;signers=3\n"));
    underquorum.run();
    for (const auto& [id, rt] : underquorum.all_ases())
        GATE_CHECK(gate, rt.trcs.current_version(1) == 1u);
}

// Criterion 9: route-forging and truncating adversaries leave every path
// server clean over a 300 s run.
TEST(Acceptance, C09HijackResistance) {
    Gate gate{"9", "hijack-resistance"};
    SimEngine engine(scenario_text(
        "topology fig.topo\nseed 31\nduration 300\n"
        "at 20 attack FORGE_PCB 1-10\n"
        "at 20 attack HIJACK_ANNOUNCE 1-30\n"));
    Metrics& m = engine.run();
    GATE_CHECK(gate, m.get("attack.forge_pcb.sent") > 0);
    GATE_CHECK(gate, m.get("attack.hijack.sent") > 0);
    GATE_CHECK(gate, m.sum_prefix("pcb.invalid.") > 0);
    auto violations = engine.audit();
    for (const std::string& v : violations) ADD_FAILURE() << v;
    GATE_CHECK(gate, violations.empty());
    // The forged adjacency (interfaces 4001/4002) is registered nowhere.
    for (IsdId isd : engine.topology().isds()) {
        for (const PathSegment* seg : engine.core_ps(isd).down_store.all()) {
            GATE_CHECK(gate, !seg->uses_interface(as("1-10"), 4001));
            GATE_CHECK(gate, !seg->uses_interface(as("1-10"), 4002));
        }
    }
}

// Criterion 10: equal seeds reproduce byte-identical metric exports for
// every acceptance scenario.
TEST(Acceptance, C10Determinism) {
    Gate gate{"10", "determinism"};
    const std::string scenarios[] = {
        "topology fig.topo\nseed 41\nduration 90\n"
        "flow 1-30/1 1-50 rate 10 paths 2 start 40\n",
        "topology fanin8.topo\nseed 42\nduration 200\n",
        "topology diamond.topo\nseed 43\nduration 120\n"
        "flow 1-50/1 1-60 rate 10 paths 2 start 40 until 100\n"
        "at 70 fail-link 1-1:6~1-30:1\n",
        "topology chain3.topo\nseed 44\nduration 120\n"
        "at 20 trc-update 1 version=2;signers=4\n",
        "topology fig.topo\nseed 45\nduration 120\n"
        "at 20 attack FORGE_PCB 1-10\nat 20 attack HIJACK_ANNOUNCE 1-30\n"
        "at 30 attack FORGE_OF 1-30 1-50 5000\nat 40 attack FORGE_SCMP 1-40 1-10:5\n",
    };
    for (const std::string& text : scenarios) {
        SimEngine first(scenario_text(text));
        SimEngine second(scenario_text(text));
        std::string a = first.run().export_records();
        std::string b = second.run().export_records();
        GATE_CHECK(gate, a == b);
        GATE_CHECK(gate, !a.empty());
    }
}
