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

#include <algorithm>
#include <limits>

#include "scion/sim/engine.hpp"

namespace scion::sim {

namespace {

Bytes flow_payload(int flow_id, std::uint64_t seq, bool is_ack) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(flow_id));
    w.u64(seq);
    w.u8(is_ack ? 1 : 0);
    return w.take();
}

std::size_t shared_as_count(const EndToEndPath& a, const EndToEndPath& b) {
    auto sa = a.as_sequence();
    auto sb = b.as_sequence();
    std::set<AsId> sa_mid(sa.begin() + 1, sa.end() - (sa.size() > 1 ? 1 : 0));
    std::size_t shared = 0;
    for (std::size_t i = 1; i + 1 < sb.size(); ++i) shared += sa_mid.count(sb[i]);
    return shared;
}

}  // namespace

void SimEngine::emit_packet_from(const AsId& as, SimPacket packet) {
    packet.sent_us = now_;
    schedule(now_ + options_.local_latency_us,
             EvPacket{as, kNoInterface, std::move(packet)});
}

void SimEngine::on_packet(const EvPacket& ev) {
    AsRuntime& as = ases_.at(ev.to);
    const SimPacket& pkt = ev.packet;

    ForwardAction action = forward(
        as.secrets, pkt.header, ev.to_if,
        [&](InterfaceId ifid) { return link_up_at(ev.to, ifid); }, now_);

    std::string flow_prefix =
        pkt.flow_id >= 0 ? "flow." + std::to_string(pkt.flow_id) + "." : "";

    if (auto* fwd = std::get_if<ActionForward>(&action)) {
        metrics_.add("pkt.forwarded");
        if (pkt.forged && !as.adversary) {
            // A forged packet surviving an honest AS's checks has traversed
            // beyond it.
            metrics_.add("attack.forged_of.traversed");
        }
        const Link* link = topo_.find_link(ev.to, fwd->egress_if);
        if (!link) {
            metrics_.add("pkt.drop.malformed");
            return;
        }
        SimPacket next = pkt;
        next.header = std::move(fwd->header);
        if (!as.adversary) next.honest_forwards += 1;
        if (packet_tap) packet_tap(next.header.encode());
        schedule(now_ + options_.link_latency_us,
                 EvPacket{link->other(ev.to), link->if_of_other(ev.to), std::move(next)});
        return;
    }
    if (std::get_if<ActionDeliver>(&action)) {
        if (pkt.dst_as != ev.to) {
            metrics_.add("pkt.misdelivered");
            return;
        }
        // Only the delivering AS reads the destination address.
        (void)pkt.header.dst_addr();
        schedule(now_ + options_.local_latency_us, EvHostPacket{ev.to, pkt});
        return;
    }
    if (auto* drop = std::get_if<ActionDrop>(&action)) {
        metrics_.add("pkt.drop." + to_string(drop->reason));
        if (!flow_prefix.empty())
            metrics_.add(flow_prefix + (pkt.is_ack ? "ack_dropped." : "dropped.") +
                         to_string(drop->reason));
        if (pkt.forged) metrics_.add("attack.forged_of.rejected");
        return;
    }
    auto& revoke = std::get<ActionDropRevoke>(action);
    metrics_.add("pkt.drop.link-down");
    if (!flow_prefix.empty())
        metrics_.add(flow_prefix + (pkt.is_ack ? "ack_dropped." : "dropped.") +
                     "link-down");

    flood_revocation(ev.to, revoke.dead_if);

    // In-band revocation back to the sender along the reversed path.
    if (pkt.src_as != ev.to && !pkt.scmp) {
        SimPacket scmp_pkt;
        scmp_pkt.header = std::move(revoke.revoke_path);
        scmp_pkt.src_as = ev.to;
        scmp_pkt.dst_as = pkt.src_as;
        scmp_pkt.scmp = scmp_auth(as.secrets, ScmpType::RevokeInterface, ev.to,
                                  revoke.dead_if, now_, pkt.src_as);
        metrics_.add("scmp.sent.inband_revoke");
        emit_packet_from(ev.to, std::move(scmp_pkt));
    }
}

void SimEngine::on_host_packet(const EvHostPacket& ev) {
    const SimPacket& pkt = ev.packet;
    if (pkt.scmp) {
        deliver_scmp_to_host(ev.at, pkt);
        return;
    }
    if (pkt.flow_id < 0) {
        metrics_.add("pkt.delivered.other");
        return;
    }
    FlowState& flow = flows_.at(static_cast<std::size_t>(pkt.flow_id));
    if (pkt.is_ack) {
        if (ev.at != flow.spec.src_as) return;
        auto it = flow.unacked.find(pkt.seq);
        if (it != flow.unacked.end()) {
            flow.unacked.erase(it);
            flow.consecutive_timeouts = 0;
        }
        return;
    }
    if (ev.at != flow.spec.dst_as) return;

    flow.delivered += 1;
    if (flow.last_delivery_us >= 0)
        flow.gap_max_us = std::max(flow.gap_max_us, now_ - flow.last_delivery_us);
    flow.last_delivery_us = now_;

    // Echo back along the inverted header.
    SimPacket ack;
    ack.header = reverse_header(pkt.header);
    ack.header.payload = flow_payload(pkt.flow_id, pkt.seq, true);
    ack.src_as = ev.at;
    ack.dst_as = pkt.src_as;
    ack.flow_id = pkt.flow_id;
    ack.seq = pkt.seq;
    ack.is_ack = true;
    emit_packet_from(ev.at, std::move(ack));
}

void SimEngine::deliver_scmp_to_host(const AsId& at, const SimPacket& packet) {
    metrics_.add("scmp.received.inband");
    // Same verification and purge path as the control-plane copy; the seen
    // set collapses duplicates.
    on_revoke(EvRevoke{at, *packet.scmp});
}

void SimEngine::on_flow_tick(const EvFlowTick& ev) {
    FlowState& flow = flows_.at(static_cast<std::size_t>(ev.flow_id));
    if (flow.status == FlowStatus::Done) return;
    if (now_ >= flow.spec.until_us) {
        flow.status = FlowStatus::Done;
        return;
    }

    if (flow.status == FlowStatus::WaitingPath) {
        if (!flow.pending_lookup) flow_begin_lookup(flow);
    } else if (flow.status == FlowStatus::Active) {
        flow_send_packet(flow);
    }
    SimTime period = static_cast<SimTime>(1e6 / flow.spec.rate_pps);
    schedule(now_ + std::max<SimTime>(period, 1), EvFlowTick{ev.flow_id});
}

void SimEngine::flow_begin_lookup(FlowState& flow) {
    std::uint64_t id = next_lookup_id_++;
    flow.pending_lookup = id;
    PendingLookup pending;
    pending.requester = flow.spec.src_as;
    pending.target = flow.spec.dst_as;
    pending.flow_id = flow.spec.id;
    pending_lookups_.emplace(id, std::move(pending));
    metrics_.add("lookup.requests");
    start_lookup(id, flow.spec.src_as, flow.spec.dst_as);
}

void SimEngine::flow_adopt_paths(FlowState& flow, const LookupReply& reply) {
    auto ranked = combine(reply.up, reply.core, reply.down, flow.spec.src_as,
                          flow.spec.dst_as, topo_);
    if (ranked.empty()) {
        metrics_.add("flow." + std::to_string(flow.spec.id) + ".no_path");
        if (flow.status == FlowStatus::WaitingPath)
            schedule(now_ + kSecond, EvFlowRetry{flow.spec.id});
        return;
    }

    // Maximize pairwise disjointness: best-ranked first, then repeatedly the
    // candidate sharing the fewest transit ASes with everything chosen.
    std::vector<EndToEndPath> chosen{ranked.front()};
    std::vector<bool> used(ranked.size(), false);
    used[0] = true;
    while (chosen.size() < flow.spec.path_degree) {
        std::size_t best = ranked.size();
        std::size_t best_shared = std::numeric_limits<std::size_t>::max();
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            if (used[i]) continue;
            std::size_t shared = 0;
            for (const EndToEndPath& c : chosen)
                shared = std::max(shared, shared_as_count(ranked[i], c));
            if (shared < best_shared) {
                best_shared = shared;
                best = i;
            }
        }
        if (best == ranked.size()) break;
        used[best] = true;
        chosen.push_back(ranked[best]);
    }

    flow.paths.clear();
    for (EndToEndPath& path : chosen) flow.paths.push_back(FlowPath{std::move(path), true});
    flow.active = 0;
    flow.consecutive_timeouts = 0;
    flow.status = FlowStatus::Active;
    metrics_.add("flow." + std::to_string(flow.spec.id) + ".paths_adopted");
}

void SimEngine::flow_send_packet(FlowState& flow) {
    const EndToEndPath& path = flow.paths[flow.active].path;
    SimPacket pkt;
    pkt.header = encode_header(path, AddrType::None, {}, AddrType::None, {});
    pkt.header.payload = flow_payload(flow.spec.id, flow.next_seq, false);
    pkt.src_as = flow.spec.src_as;
    pkt.dst_as = flow.spec.dst_as;
    pkt.flow_id = flow.spec.id;
    pkt.seq = flow.next_seq++;
    flow.sent += 1;
    metrics_.add("flow." + std::to_string(flow.spec.id) + ".sent_pkts");

    flow.unacked[pkt.seq] = now_;
    SimTime rtt = 2 * (static_cast<SimTime>(path.hop_count()) *
                           options_.link_latency_us +
                       2 * options_.local_latency_us);
    schedule(now_ + rtt + 50'000, EvAckTimeout{flow.spec.id, pkt.seq});
    emit_packet_from(flow.spec.src_as, std::move(pkt));
}

void SimEngine::on_ack_timeout(const EvAckTimeout& ev) {
    FlowState& flow = flows_.at(static_cast<std::size_t>(ev.flow_id));
    auto it = flow.unacked.find(ev.seq);
    if (it == flow.unacked.end()) return;
    flow.unacked.erase(it);
    flow.consecutive_timeouts += 1;
    metrics_.add("flow." + std::to_string(ev.flow_id) + ".ack_timeouts");
    if (flow.status == FlowStatus::Active && flow.consecutive_timeouts >= 3)
        flow_failover(flow, "timeouts");
}

void SimEngine::flow_failover(FlowState& flow, const std::string& why) {
    flow.paths[flow.active].alive = false;
    metrics_.add("flow." + std::to_string(flow.spec.id) + ".failover." + why);
    for (std::size_t i = 0; i < flow.paths.size(); ++i) {
        if (!flow.paths[i].alive) continue;
        flow.active = i;
        flow.consecutive_timeouts = 0;
        flow.switchovers += 1;
        return;
    }
    // No working path left: resolve afresh.
    flow.status = FlowStatus::WaitingPath;
    flow.paths.clear();
    flow.active = 0;
    flow.consecutive_timeouts = 0;
    if (!flow.pending_lookup) schedule(now_ + 200'000, EvFlowRetry{flow.spec.id});
}

void SimEngine::on_flow_retry(const EvFlowRetry& ev) {
    FlowState& flow = flows_.at(static_cast<std::size_t>(ev.flow_id));
    if (flow.status != FlowStatus::WaitingPath || flow.pending_lookup) return;
    if (now_ >= flow.spec.until_us) return;
    flow_begin_lookup(flow);
}

// ---- adversaries ------------------------------------------------------------

void SimEngine::on_attack_pulse(const EvAttackPulse& ev) {
    run_attack(attacks_.at(ev.attack_index));
    const AttackDirective& attack = attacks_.at(ev.attack_index);
    if (attack.kind == AttackKind::ForgePcb || attack.kind == AttackKind::HijackAnnounce) {
        SimTime next = now_ + policy_.interval_intra_us;
        if (next <= scenario_.duration_us) schedule(next, EvAttackPulse{ev.attack_index});
    }
}

void SimEngine::run_attack(const AttackDirective& attack) {
    if (!ases_.count(attack.adversary)) return;
    AsRuntime& adv = ases_.at(attack.adversary);

    switch (attack.kind) {
        case AttackKind::ForgePcb: {
            // A beacon whose last hop claims interfaces that exist on no
            // link: an announced adjacency that is not in the topology.
            PcbInfo info;
            info.timestamp_s = static_cast<std::uint32_t>(now_ / 1'000'000);
            info.origin = attack.adversary;
            info.isd = attack.adversary.isd;
            info.kind = SegmentKind::Up;
            Pcb bogus = originate_pcb(adv.secrets, info, 4001, {},
                                      attested_trc_version(adv), 1,
                                      policy_.expiry_units);
            // Extension variant on top of a genuinely received beacon.
            std::optional<Pcb> extended;
            auto candidates = adv.pool.candidates(SegmentKind::Up, now_, policy_);
            if (!candidates.empty()) {
                extended = extend_pcb(candidates.front()->pcb, adv.secrets, 4001, 4002,
                                      {}, attested_trc_version(adv), 1,
                                      policy_.expiry_units);
            }
            for (const auto& [ifid, end] : topo_.as_node(attack.adversary).interfaces) {
                if (!link_up_index(end.link_index)) continue;
                metrics_.add("attack.forge_pcb.sent");
                schedule(now_ + options_.link_latency_us,
                         EvPcb{attack.adversary, end.peer, end.remote_if, bogus});
                if (extended) {
                    metrics_.add("attack.forge_pcb.sent");
                    schedule(now_ + options_.link_latency_us,
                             EvPcb{attack.adversary, end.peer, end.remote_if, *extended});
                }
            }
            break;
        }

        case AttackKind::HijackAnnounce: {
            // Shorten a genuine beacon by cutting a middle hop, then re-sign
            // only the adversary's own extension.
            auto candidates = adv.pool.candidates(SegmentKind::Up, now_, policy_);
            const Pcb* base = nullptr;
            for (const PoolEntry* entry : candidates) {
                if (entry->pcb.hops.size() >= 2) {
                    base = &entry->pcb;
                    break;
                }
            }
            if (!base) break;
            Pcb truncated = *base;
            truncated.hops.erase(truncated.hops.begin() + 1);
            auto arrival = arrival_interface(*base, attack.adversary);
            for (const auto& [ifid, end] : topo_.as_node(attack.adversary).interfaces) {
                if (!link_up_index(end.link_index)) continue;
                auto forged = extend_pcb(truncated, adv.secrets, arrival, end.local_if,
                                         {}, attested_trc_version(adv), 1,
                                         policy_.expiry_units);
                if (!forged) continue;
                metrics_.add("attack.hijack.sent");
                schedule(now_ + options_.link_latency_us,
                         EvPcb{attack.adversary, end.peer, end.remote_if, *forged});
            }
            break;
        }

        case AttackKind::ForgeOf: {
            // Syntactically perfect headers along a real route, with random
            // MACs for every hop the adversary has no key for.
            auto sequences = enumerate_oracle(topo_, attack.adversary, attack.target_as);
            if (sequences.empty()) break;
            std::vector<AsId> route = *sequences.begin();
            for (const auto& seq : sequences)
                if (seq.size() < route.size()) route = seq;
            if (route.size() < 2) break;

            auto& rng = rng_.stream("attack/forge_of/" + attack.adversary.to_string());
            const Link* first_link = nullptr;
            std::vector<std::pair<InterfaceId, InterfaceId>> interfaces;  // per hop
            for (std::size_t i = 0; i + 1 < route.size(); ++i) {
                const Link* found = nullptr;
                for (const auto& [ifid, end] : topo_.as_node(route[i]).interfaces) {
                    const Link& link = topo_.links()[end.link_index];
                    if (link.other(route[i]) == route[i + 1]) {
                        found = &link;
                        break;
                    }
                }
                if (!found) return;
                if (i == 0) first_link = found;
                interfaces.emplace_back(found->if_of(route[i]),
                                        found->if_of_other(route[i]));
            }

            for (std::uint64_t n = 0; n < attack.count; ++n) {
                PathSlice slice;
                slice.kind = SegmentKind::Down;
                slice.reversed = false;
                slice.timestamp_s = static_cast<std::uint32_t>(now_ / 1'000'000);
                slice.isd = attack.adversary.isd;
                for (std::size_t i = 0; i < route.size(); ++i) {
                    InterfaceId in = i == 0 ? kNoInterface : interfaces[i - 1].second;
                    InterfaceId out = i + 1 < route.size() ? interfaces[i].first : kNoInterface;
                    OpaqueField of;
                    of.flags = 0;
                    of.expiry_units = policy_.expiry_units;
                    of.ingress_if = in;
                    of.egress_if = out;
                    of.mac = static_cast<std::uint32_t>(rng() & 0xffffff);
                    slice.hops.push_back(PathHop{route[i], in, out, of});
                }
                EndToEndPath path;
                path.case_tag = PathCase::Immediate;
                path.src = attack.adversary;
                path.dst = attack.target_as;
                path.slices.push_back(slice);

                SimPacket pkt;
                pkt.header = encode_header(path, AddrType::None, {}, AddrType::None, {});
                // Skip the adversary's own hop: inject directly at the first
                // honest neighbor, pointer already advanced.
                pkt.header.set_position({0, 1});
                pkt.src_as = attack.adversary;
                pkt.dst_as = attack.target_as;
                pkt.forged = true;
                pkt.sent_us = now_;
                metrics_.add("attack.forged_of.sent");
                schedule(now_ + options_.link_latency_us + n * 10,
                         EvPacket{route[1], first_link->if_of_other(route[0]), pkt});
            }
            break;
        }

        case AttackKind::ForgeScmp: {
            // A revocation for a healthy interface, issuer spoofed as the
            // victim, tag random: every verifier fetches the real DRKey and
            // the tag never matches.
            auto& rng = rng_.stream("attack/forge_scmp/" + attack.adversary.to_string());
            ScmpMessage msg;
            msg.type = ScmpType::RevokeInterface;
            msg.issuer = attack.target_as;
            msg.subject_as = attack.target_as;
            msg.subject_if = attack.target_if;
            msg.timestamp_us = now_;
            for (auto& byte : msg.auth_tag)
                byte = static_cast<std::uint8_t>(rng() & 0xff);
            for (const auto& [id, rt] : ases_) {
                if (id == attack.adversary) continue;
                auto latency = control_latency(attack.adversary, id);
                if (!latency) continue;
                metrics_.add("attack.forge_scmp.sent");
                schedule(now_ + *latency, EvRevoke{id, msg});
            }
            break;
        }
    }
}

}  // namespace scion::sim
