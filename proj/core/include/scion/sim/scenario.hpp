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
#include <variant>
#include <vector>

#include "scion/beacon.hpp"
#include "scion/topology.hpp"

namespace scion::sim {

using SimTime = std::int64_t;  // simulated microseconds

inline constexpr SimTime kSecond = 1'000'000;

struct FailLinkDirective {
    std::string link_id;
    std::optional<SimTime> restore_at;
};

enum class AttackKind { ForgePcb, ForgeOf, ForgeScmp, HijackAnnounce };

std::optional<AttackKind> attack_kind_from_string(std::string_view s);
std::string to_string(AttackKind k);

struct AttackDirective {
    AttackKind kind = AttackKind::ForgePcb;
    AsId adversary;
    AsId target_as;              // ForgeOf: destination; ForgeScmp: victim
    InterfaceId target_if = 0;   // ForgeScmp: victim interface
    std::uint64_t count = 1000;  // ForgeOf: packets to emit
};

/// Inline TRC fixture: the next version of an ISD's TRC, signed by the first
/// `signer_count` roots of the previous version. `rotate` lists root indices
/// that receive fresh keys.
struct TrcUpdateDirective {
    IsdId isd = 0;
    std::uint32_t version = 2;
    std::uint16_t signer_count = 0;
    std::vector<std::uint16_t> rotate;
    std::optional<std::uint16_t> quorum_cert;
    std::optional<std::uint16_t> quorum_trc;
};

struct Directive {
    SimTime at_us = 0;
    std::variant<FailLinkDirective, AttackDirective, TrcUpdateDirective> action;
};

struct FlowSpec {
    int id = 0;
    AsId src_as;
    std::uint32_t src_host = 1;
    AsId dst_as;
    double rate_pps = 1.0;
    std::size_t path_degree = 2;
    SimTime start_us = 30 * kSecond;
    SimTime until_us = 0;  // 0: run to scenario end
};

struct TrcConfig {
    std::uint16_t roots = 4;
    std::uint16_t quorum_cert = 2;
    std::uint16_t quorum_trc = 4;
};

struct ScenarioOptions {
    bool cache_enabled = true;
    bool prefill_certs = true;
    SimTime link_latency_us = 10'000;  // per inter-AS link hop
    SimTime local_latency_us = 1'000;  // intra-AS
    BeaconPolicy policy;
    TrcConfig default_trc;
    std::map<IsdId, TrcConfig> trc_configs;

    TrcConfig trc_config(IsdId isd) const {
        auto it = trc_configs.find(isd);
        return it == trc_configs.end() ? default_trc : it->second;
    }
};

/// A complete simulation input: the world, the clock limit, the event
/// script, and the traffic.
///
/// Text form (one directive per line, '#' comments):
///
///   topology <path>
///   seed <n>
///   duration <seconds>
///   at <t> fail-link <link-id> [restore <t2>]
///   at <t> attack <FORGE_PCB|FORGE_OF|FORGE_SCMP|HIJACK_ANNOUNCE> <params>
///   at <t> trc-update <isd> version=<v>;signers=<n>[;rotate=<i,j>]...
///   flow <src-as>/<host> <dst-as> rate <pps> paths <n> [start <t>] [until <t>]
///   option <cache|prefill-certs> <on|off>
///   option <link-latency-ms|local-latency-ms> <n>
///   policy <k-intra|k-inter> <n|inf>
///   policy <interval-intra|interval-inter> <seconds>
///   policy weights <w_len> <w_disjoint> <w_fresh> <w_consistency>
///   policy of-expiry-units <n>
///   policy require-label <label>
///   trc-config <isd> roots=<n> cert-quorum=<n> trc-quorum=<n>
struct Scenario {
    std::string topology_path;
    std::optional<Topology> topology;  // set when loaded or built in-process
    std::uint64_t seed = 1;
    SimTime duration_us = 0;
    ScenarioOptions options;
    std::vector<Directive> directives;
    std::vector<FlowSpec> flows;

    /// Parses the text form. `base_dir` resolves relative topology paths.
    /// Throws ParseError naming the offending line.
    static Scenario parse(std::string_view text, const std::string& base_dir = "");
    static Scenario load_file(const std::string& path);

    /// Loads the referenced topology unless one is already attached.
    const Topology& resolve_topology();
};

}  // namespace scion::sim
