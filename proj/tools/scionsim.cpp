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

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "scion/packet.hpp"
#include "scion/sim/engine.hpp"

namespace {

using namespace scion;
using namespace scion::sim;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Options {
    std::string topo;
    std::string scenario;
    std::string out;
    std::string format = "text";
    std::string dump_packets;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string from;
    std::string to;
    double after_s = 60.0;
    int paths_index = 0;
    std::string src_addr;
    std::string dst_addr;
};

Scenario quiet_scenario(const std::string& topo_path, double duration_s,
                        std::uint64_t seed) {
    Scenario sc;
    sc.topology_path = topo_path;
    sc.seed = seed;
    sc.duration_us = static_cast<SimTime>(duration_s * 1e6);
    return sc;
}

AsId parse_as_or_throw(const std::string& text) {
    auto id = AsId::parse(text);
    if (!id) throw ValidationError("invalid AS id '" + text + "'");
    return *id;
}

std::pair<AddrType, Bytes> parse_addr(const std::string& spec) {
    if (spec.empty()) return {AddrType::None, {}};
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw ValidationError("address expects <type>:<hex>");
    std::string kind = spec.substr(0, colon);
    Bytes value = from_hex(spec.substr(colon + 1));
    AddrType type;
    if (kind == "ipv4") type = AddrType::Ipv4;
    else if (kind == "mac") type = AddrType::Mac48;
    else if (kind == "ipv6") type = AddrType::Ipv6;
    else if (kind == "aip") type = AddrType::Aip;
    else throw ValidationError("unknown address type '" + kind + "'");
    if (value.size() != addr_len(type))
        throw ValidationError("address length mismatch for " + kind);
    return {type, std::move(value)};
}

int cmd_check_topo(const Options& opt) {
    Topology topo = Topology::load_file(opt.topo);
    std::size_t cores = 0;
    for (const auto& [id, node] : topo.ases())
        if (node.is_core()) ++cores;
    if (opt.format == "records") {
        std::cout << "isds=" << topo.isds().size() << "\n"
                  << "ases=" << topo.ases().size() << "\n"
                  << "core_ases=" << cores << "\n"
                  << "links=" << topo.links().size() << "\n";
        for (const std::string& warning : topo.warnings())
            std::cout << "warning=" << warning << "\n";
        std::cout << "status=OK\n";
    } else {
        std::cout << topo.isds().size() << " ISDs, " << topo.ases().size()
                  << " ASes, " << topo.links().size() << " links, OK\n";
        std::cout << "core ASes:";
        for (const auto& [id, node] : topo.ases())
            if (node.is_core()) std::cout << " " << id.to_string();
        std::cout << "\n";
        for (const std::string& warning : topo.warnings())
            std::cout << "warning: " << warning << "\n";
    }
    return kExitOk;
}

int cmd_run(const Options& opt) {
    Scenario scenario = Scenario::load_file(opt.scenario);
    if (opt.seed_set) scenario.seed = opt.seed;
    scenario.resolve_topology();
    SimEngine engine(std::move(scenario));

    std::ofstream dump;
    if (!opt.dump_packets.empty()) {
        dump.open(opt.dump_packets, std::ios::binary);
        if (!dump) throw Error("cannot open dump file: " + opt.dump_packets);
        engine.packet_tap = [&dump](const Bytes& wire) {
            std::uint32_t length = static_cast<std::uint32_t>(wire.size());
            std::uint8_t prefix[4] = {static_cast<std::uint8_t>(length >> 24),
                                      static_cast<std::uint8_t>(length >> 16),
                                      static_cast<std::uint8_t>(length >> 8),
                                      static_cast<std::uint8_t>(length)};
            dump.write(reinterpret_cast<const char*>(prefix), 4);
            dump.write(reinterpret_cast<const char*>(wire.data()),
                       static_cast<std::streamsize>(wire.size()));
        };
    }

    Metrics& metrics = engine.run();
    engine.audit();
    std::string records = metrics.export_records();
    if (!opt.out.empty()) {
        std::ofstream out(opt.out);
        if (!out) throw Error("cannot open output file: " + opt.out);
        out << records;
    } else if (opt.format == "records") {
        std::cout << records;
        return kExitOk;
    }
    // The digest is always the last line on stdout.
    auto digest_pos = records.rfind("digest=");
    std::cout << records.substr(digest_pos);
    return kExitOk;
}

std::vector<EndToEndPath> resolve_paths(const Options& opt, SimEngine& engine) {
    engine.run();
    AsId from = parse_as_or_throw(opt.from);
    AsId to = parse_as_or_throw(opt.to);
    if (!engine.topology().has_as(from) || !engine.topology().has_as(to))
        throw ValidationError("unknown AS");
    return engine.query_paths(from, to);
}

int cmd_paths(const Options& opt) {
    SimEngine engine(
        quiet_scenario(opt.topo, opt.after_s, opt.seed_set ? opt.seed : 1));
    auto paths = resolve_paths(opt, engine);
    if (opt.format == "records") {
        std::cout << "paths=" << paths.size() << "\n";
        for (std::size_t i = 0; i < paths.size(); ++i) {
            std::string prefix = "path." + std::to_string(i) + ".";
            std::cout << prefix << "case=" << to_string(paths[i].case_tag) << "\n";
            std::string sequence;
            for (const AsId& as : paths[i].as_sequence()) {
                if (!sequence.empty()) sequence += ">";
                sequence += as.to_string();
            }
            std::cout << prefix << "sequence=" << sequence << "\n"
                      << prefix << "hops=" << paths[i].hop_count() << "\n"
                      << prefix << "header_bytes="
                      << 8 + paths[i].path_region_bytes() << "\n";
        }
    } else {
        if (paths.empty()) std::cout << "no paths\n";
        for (const EndToEndPath& path : paths) {
            std::cout << to_string(path.case_tag) << "  ";
            bool first = true;
            for (const AsId& as : path.as_sequence()) {
                if (!first) std::cout << ">";
                std::cout << as.to_string();
                first = false;
            }
            std::cout << "  hops=" << path.hop_count()
                      << " header=" << 8 + path.path_region_bytes() << "B\n";
        }
    }
    return kExitOk;
}

int cmd_dump_header(const Options& opt) {
    SimEngine engine(
        quiet_scenario(opt.topo, opt.after_s, opt.seed_set ? opt.seed : 1));
    auto paths = resolve_paths(opt, engine);
    if (paths.empty()) throw ValidationError("no path between the given ASes");
    if (opt.paths_index < 0 ||
        static_cast<std::size_t>(opt.paths_index) >= paths.size())
        throw ValidationError("paths-index out of range");

    auto [src_type, src_bytes] = parse_addr(opt.src_addr);
    auto [dst_type, dst_bytes] = parse_addr(opt.dst_addr);
    PacketHeader header = encode_header(paths[static_cast<std::size_t>(opt.paths_index)],
                                        src_type, src_bytes, dst_type, dst_bytes);
    Bytes wire = header.encode();

    auto summary = [](const PacketHeader& h) {
        std::size_t ofs = 0;
        for (const HeaderSegment& seg : h.segments) ofs += seg.ofs.size();
        return "segments=" + std::to_string(h.segments.size()) +
               " ofs=" + std::to_string(ofs) +
               " path-region=" + std::to_string(h.path_region_bytes()) + "B" +
               " total=" + std::to_string(h.encode().size()) + "B";
    };

    std::cout << to_hex(wire) << "\n";
    std::cout << summary(header) << "\n";
    std::cout << summary(PacketHeader::decode(wire)) << "\n";
    return kExitOk;
}

int cmd_report(const Options& opt) {
    Scenario scenario = Scenario::load_file(opt.scenario);
    if (opt.seed_set) scenario.seed = opt.seed;
    scenario.resolve_topology();
    std::size_t flow_count = scenario.flows.size();
    SimEngine engine(std::move(scenario));
    Metrics& m = engine.run();
    auto violations = engine.audit();

    std::cout << "simulated " << m.get("sim.end_us") / 1'000'000.0 << " s\n";
    std::cout << "beacons: originated=" << m.get("pcb.originated")
              << " sent=" << m.get("pcb.sent.total")
              << " received=" << m.get("pcb.received")
              << " invalid=" << m.sum_prefix("pcb.invalid.") << "\n";
    std::cout << "lookups: requests=" << m.get("lookup.requests")
              << " messages=" << m.get("lookup.messages")
              << " cache-hits=" << m.get("lookup.cache_hits") << "\n";
    std::cout << "registrations: sent=" << m.get("register.sent")
              << " accepted=" << m.get("register.accepted")
              << " rejected=" << m.get("register.rejected") << "\n";
    std::cout << "packets: forwarded=" << m.get("pkt.forwarded")
              << " dropped=" << m.sum_prefix("pkt.drop.") << "\n";
    std::cout << "revocations: processed=" << m.get("revocation.processed")
              << " purged=" << m.get("revocation.purged")
              << " bad-proof=" << m.get("scmp.bad_proof") << "\n";
    for (std::size_t i = 0; i < flow_count; ++i) {
        std::string p = "flow." + std::to_string(i) + ".";
        if (!m.has(p + "sent")) continue;
        std::cout << "flow " << i << ": sent=" << m.get(p + "sent")
                  << " delivered=" << m.get(p + "delivered")
                  << " dropped=" << m.sum_prefix(p + "dropped.")
                  << " gap-max=" << m.get(p + "gap_max_us") / 1000 << "ms"
                  << " switchovers=" << m.get(p + "switchovers") << "\n";
    }
    std::cout << "audit: " << violations.size() << " violations\n";
    char digest_hex[17];
    std::snprintf(digest_hex, sizeof(digest_hex), "%016llx",
                  static_cast<unsigned long long>(m.digest()));
    std::cout << "digest=" << digest_hex << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic inter-domain path-aware networking simulator"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--format", opt.format, "output format")
            ->check(CLI::IsMember({"text", "records"}));
        cmd->add_option("--seed", opt.seed, "override the random seed")
            ->each([&](const std::string&) { opt.seed_set = true; });
    };

    CLI::App* check = app.add_subcommand("check-topo", "validate a topology file");
    check->add_option("--topo", opt.topo, "topology file")->required();
    add_common(check);

    CLI::App* run = app.add_subcommand("run", "run a scenario and export metrics");
    run->add_option("--scenario", opt.scenario, "scenario file")->required();
    run->add_option("--out", opt.out, "metrics output file");
    run->add_option("--dump-packets", opt.dump_packets,
                    "write length-prefixed packet records to this file");
    add_common(run);

    CLI::App* paths = app.add_subcommand("paths", "list end-to-end paths");
    paths->add_option("--topo", opt.topo, "topology file")->required();
    paths->add_option("--from", opt.from, "source AS")->required();
    paths->add_option("--to", opt.to, "destination AS")->required();
    paths->add_option("--after", opt.after_s, "simulated warm-up seconds");
    add_common(paths);

    CLI::App* dump = app.add_subcommand("dump-header", "print a packet header");
    dump->add_option("--topo", opt.topo, "topology file")->required();
    dump->add_option("--from", opt.from, "source AS")->required();
    dump->add_option("--to", opt.to, "destination AS")->required();
    dump->add_option("--after", opt.after_s, "simulated warm-up seconds");
    dump->add_option("--paths-index", opt.paths_index, "which ranked path");
    dump->add_option("--src-addr", opt.src_addr, "source address <type>:<hex>");
    dump->add_option("--dst-addr", opt.dst_addr, "destination address <type>:<hex>");
    add_common(dump);

    CLI::App* report = app.add_subcommand("report", "run a scenario and summarize");
    report->add_option("--scenario", opt.scenario, "scenario file")->required();
    add_common(report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (check->parsed()) return cmd_check_topo(opt);
        if (run->parsed()) return cmd_run(opt);
        if (paths->parsed()) return cmd_paths(opt);
        if (dump->parsed()) return cmd_dump_header(opt);
        if (report->parsed()) return cmd_report(opt);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitValidation;
}
