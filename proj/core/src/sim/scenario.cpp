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

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace scion::sim {

namespace {

std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    std::string token;
    while (in >> token) out.push_back(token);
    return out;
}

template <typename T>
bool parse_uint(std::string_view s, T& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_seconds(const std::string& s, SimTime& out) {
    try {
        std::size_t consumed = 0;
        double value = std::stod(s, &consumed);
        if (consumed != s.size() || value < 0 || !std::isfinite(value)) return false;
        out = static_cast<SimTime>(std::llround(value * 1e6));
        return true;
    } catch (...) {
        return false;
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace

std::optional<AttackKind> attack_kind_from_string(std::string_view s) {
    if (s == "FORGE_PCB") return AttackKind::ForgePcb;
    if (s == "FORGE_OF") return AttackKind::ForgeOf;
    if (s == "FORGE_SCMP") return AttackKind::ForgeScmp;
    if (s == "HIJACK_ANNOUNCE") return AttackKind::HijackAnnounce;
    return std::nullopt;
}

std::string to_string(AttackKind k) {
    switch (k) {
        case AttackKind::ForgePcb: return "FORGE_PCB";
        case AttackKind::ForgeOf: return "FORGE_OF";
        case AttackKind::ForgeScmp: return "FORGE_SCMP";
        case AttackKind::HijackAnnounce: return "HIJACK_ANNOUNCE";
    }
    return "?";
}

Scenario Scenario::parse(std::string_view text, const std::string& base_dir) {
    Scenario sc;
    int flow_id = 0;
    int number = 0;
    std::size_t pos = 0;

    auto fail = [&number](const std::string& msg) -> ParseError {
        return ParseError(msg, number);
    };

    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view raw = text.substr(
            pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        ++number;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        if (auto hash = raw.find('#'); hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        auto t = tokenize(raw);
        if (t.empty()) continue;

        if (t[0] == "topology" && t.size() == 2) {
            sc.topology_path = base_dir.empty() ? t[1] : base_dir + "/" + t[1];
        } else if (t[0] == "seed" && t.size() == 2) {
            if (!parse_uint(t[1], sc.seed)) throw fail("invalid seed");
        } else if (t[0] == "duration" && t.size() == 2) {
            if (!parse_seconds(t[1], sc.duration_us) || sc.duration_us < 0)
                throw fail("invalid duration");
        } else if (t[0] == "at" && t.size() >= 3) {
            Directive d;
            if (!parse_seconds(t[1], d.at_us)) throw fail("invalid directive time");
            if (t[2] == "fail-link") {
                if (t.size() < 4) throw fail("fail-link expects a link id");
                FailLinkDirective fl;
                fl.link_id = t[3];
                if (t.size() >= 6 && t[4] == "restore") {
                    SimTime restore = 0;
                    if (!parse_seconds(t[5], restore)) throw fail("invalid restore time");
                    fl.restore_at = restore;
                } else if (t.size() != 4) {
                    throw fail("malformed fail-link directive");
                }
                d.action = fl;
            } else if (t[2] == "attack") {
                if (t.size() < 5) throw fail("attack expects a kind and adversary");
                AttackDirective at;
                auto kind = attack_kind_from_string(t[3]);
                if (!kind) throw fail("unknown attack kind '" + t[3] + "'");
                at.kind = *kind;
                auto adv = AsId::parse(t[4]);
                if (!adv) throw fail("invalid adversary as");
                at.adversary = *adv;
                if (at.kind == AttackKind::ForgeOf) {
                    if (t.size() < 7) throw fail("FORGE_OF expects <dst-as> <count>");
                    auto dst = AsId::parse(t[5]);
                    if (!dst) throw fail("invalid FORGE_OF destination");
                    at.target_as = *dst;
                    if (!parse_uint(t[6], at.count)) throw fail("invalid FORGE_OF count");
                } else if (at.kind == AttackKind::ForgeScmp) {
                    if (t.size() < 6) throw fail("FORGE_SCMP expects <victim-as>:<if>");
                    auto parts = split(t[5], ':');
                    if (parts.size() != 2) throw fail("FORGE_SCMP expects <victim-as>:<if>");
                    auto victim = AsId::parse(parts[0]);
                    std::uint16_t ifid = 0;
                    if (!victim || !parse_uint(parts[1], ifid))
                        throw fail("invalid FORGE_SCMP victim");
                    at.target_as = *victim;
                    at.target_if = ifid;
                }
                d.action = at;
            } else if (t[2] == "trc-update") {
                if (t.size() < 5) throw fail("trc-update expects <isd> <fixture>");
                TrcUpdateDirective tu;
                if (!parse_uint(t[3], tu.isd) || tu.isd == 0) throw fail("invalid isd");
                for (const std::string& field : split(t[4], ';')) {
                    auto eq = field.find('=');
                    if (eq == std::string::npos) throw fail("malformed trc fixture field");
                    std::string key = field.substr(0, eq);
                    std::string value = field.substr(eq + 1);
                    if (key == "version") {
                        if (!parse_uint(value, tu.version)) throw fail("invalid version");
                    } else if (key == "signers") {
                        if (!parse_uint(value, tu.signer_count))
                            throw fail("invalid signers");
                    } else if (key == "rotate") {
                        for (const std::string& idx : split(value, ',')) {
                            std::uint16_t index = 0;
                            if (!parse_uint(idx, index)) throw fail("invalid rotate index");
                            tu.rotate.push_back(index);
                        }
                    } else if (key == "cert-quorum") {
                        std::uint16_t q = 0;
                        if (!parse_uint(value, q)) throw fail("invalid cert-quorum");
                        tu.quorum_cert = q;
                    } else if (key == "trc-quorum") {
                        std::uint16_t q = 0;
                        if (!parse_uint(value, q)) throw fail("invalid trc-quorum");
                        tu.quorum_trc = q;
                    } else {
                        throw fail("unknown trc fixture field '" + key + "'");
                    }
                }
                d.action = tu;
            } else {
                throw fail("unknown directive '" + t[2] + "'");
            }
            sc.directives.push_back(std::move(d));
        } else if (t[0] == "flow" && t.size() >= 7) {
            FlowSpec flow;
            flow.id = flow_id++;
            auto slash = t[1].find('/');
            if (slash == std::string::npos) throw fail("flow source expects <as>/<host>");
            auto src = AsId::parse(t[1].substr(0, slash));
            if (!src || !parse_uint(std::string_view(t[1]).substr(slash + 1), flow.src_host))
                throw fail("invalid flow source");
            flow.src_as = *src;
            auto dst = AsId::parse(t[2]);
            if (!dst) throw fail("invalid flow destination");
            flow.dst_as = *dst;
            if (t[3] != "rate") throw fail("flow expects 'rate <pps>'");
            try {
                flow.rate_pps = std::stod(t[4]);
            } catch (...) {
                throw fail("invalid flow rate");
            }
            if (flow.rate_pps <= 0) throw fail("invalid flow rate");
            if (t[5] != "paths" || !parse_uint(t[6], flow.path_degree) ||
                flow.path_degree == 0)
                throw fail("flow expects 'paths <n>'");
            for (std::size_t i = 7; i + 1 < t.size(); i += 2) {
                if (t[i] == "start") {
                    if (!parse_seconds(t[i + 1], flow.start_us))
                        throw fail("invalid flow start");
                } else if (t[i] == "until") {
                    if (!parse_seconds(t[i + 1], flow.until_us))
                        throw fail("invalid flow until");
                } else {
                    throw fail("unknown flow option '" + t[i] + "'");
                }
            }
            sc.flows.push_back(flow);
        } else if (t[0] == "option" && t.size() == 3) {
            auto on_off = [&](const std::string& v) {
                if (v == "on") return true;
                if (v == "off") return false;
                throw fail("expected on|off");
            };
            if (t[1] == "cache") sc.options.cache_enabled = on_off(t[2]);
            else if (t[1] == "prefill-certs") sc.options.prefill_certs = on_off(t[2]);
            else if (t[1] == "link-latency-ms") {
                std::uint32_t ms = 0;
                if (!parse_uint(t[2], ms)) throw fail("invalid latency");
                sc.options.link_latency_us = static_cast<SimTime>(ms) * 1000;
            } else if (t[1] == "local-latency-ms") {
                std::uint32_t ms = 0;
                if (!parse_uint(t[2], ms)) throw fail("invalid latency");
                sc.options.local_latency_us = static_cast<SimTime>(ms) * 1000;
            } else {
                throw fail("unknown option '" + t[1] + "'");
            }
        } else if (t[0] == "policy" && t.size() >= 3) {
            BeaconPolicy& p = sc.options.policy;
            auto parse_k = [&](const std::string& v) -> std::size_t {
                if (v == "inf") return 0;
                std::size_t k = 0;
                if (!parse_uint(v, k) || k == 0) throw fail("invalid k");
                return k;
            };
            if (t[1] == "k-intra") p.k_intra = parse_k(t[2]);
            else if (t[1] == "k-inter") p.k_inter = parse_k(t[2]);
            else if (t[1] == "interval-intra") {
                if (!parse_seconds(t[2], p.interval_intra_us) || p.interval_intra_us <= 0)
                    throw fail("invalid interval");
            } else if (t[1] == "interval-inter") {
                if (!parse_seconds(t[2], p.interval_inter_us) || p.interval_inter_us <= 0)
                    throw fail("invalid interval");
            } else if (t[1] == "weights") {
                if (t.size() != 6) throw fail("weights expects four values");
                try {
                    p.w_len = std::stod(t[2]);
                    p.w_disjoint = std::stod(t[3]);
                    p.w_fresh = std::stod(t[4]);
                    p.w_consistency = std::stod(t[5]);
                } catch (...) {
                    throw fail("invalid weight");
                }
                double total = p.w_len + p.w_disjoint + p.w_fresh + p.w_consistency;
                if (p.w_len < 0 || p.w_disjoint < 0 || p.w_fresh < 0 ||
                    p.w_consistency < 0 || std::abs(total - 1.0) > 1e-9)
                    throw fail("weights must be nonnegative and sum to 1");
            } else if (t[1] == "of-expiry-units") {
                std::uint16_t units = 0;
                if (!parse_uint(t[2], units) || units == 0 || units > 255)
                    throw fail("invalid expiry units");
                p.expiry_units = static_cast<std::uint8_t>(units);
            } else if (t[1] == "require-label") {
                p.required_labels.push_back(t[2]);
            } else {
                throw fail("unknown policy field '" + t[1] + "'");
            }
        } else if (t[0] == "trc-config" && t.size() >= 3) {
            IsdId isd = 0;
            if (!parse_uint(t[1], isd) || isd == 0) throw fail("invalid isd");
            TrcConfig cfg = sc.options.default_trc;
            for (std::size_t i = 2; i < t.size(); ++i) {
                auto eq = t[i].find('=');
                if (eq == std::string::npos) throw fail("malformed trc-config field");
                std::string key = t[i].substr(0, eq);
                std::uint16_t value = 0;
                if (!parse_uint(std::string_view(t[i]).substr(eq + 1), value))
                    throw fail("invalid trc-config value");
                if (key == "roots") cfg.roots = value;
                else if (key == "cert-quorum") cfg.quorum_cert = value;
                else if (key == "trc-quorum") cfg.quorum_trc = value;
                else throw fail("unknown trc-config field '" + key + "'");
            }
            if (cfg.roots == 0 || cfg.quorum_cert == 0 || cfg.quorum_trc == 0 ||
                cfg.quorum_cert > cfg.roots || cfg.quorum_trc > cfg.roots)
                throw fail("inconsistent trc-config");
            sc.options.trc_configs[isd] = cfg;
        } else {
            throw fail("unrecognized scenario line");
        }
    }

    if (sc.duration_us < 0) throw ParseError("scenario duration missing");
    return sc;
}

Scenario Scenario::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scenario file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    auto slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? "" : path.substr(0, slash);
    return parse(buf.str(), base);
}

const Topology& Scenario::resolve_topology() {
    if (!topology) {
        if (topology_path.empty()) throw Error("scenario has no topology");
        topology = Topology::load_file(topology_path);
    }
    return *topology;
}

}  // namespace scion::sim
