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

#include "scion/sim/engine.hpp"

namespace scion::sim {

namespace {

std::string link_key(const Link& link) { return link.id(); }

std::uint64_t selection_digest(const std::vector<Pcb>& selected) {
    std::vector<std::uint64_t> shapes;
    shapes.reserve(selected.size());
    for (const Pcb& pcb : selected) shapes.push_back(pcb.shape_digest());
    std::sort(shapes.begin(), shapes.end());
    ByteWriter w;
    for (std::uint64_t shape : shapes) w.u64(shape);
    return fnv1a64(w.bytes());
}

}  // namespace

std::vector<PeerLinkSpec> SimEngine::live_peer_specs(const AsId& as) const {
    std::vector<PeerLinkSpec> specs;
    for (const Neighbor& n : topo_.neighbors(as, NeighborKind::Peer)) {
        if (!link_up_index(n.link_index)) continue;
        specs.push_back(PeerLinkSpec{n.peer, n.remote_if, n.local_if});
    }
    return specs;
}

InterfaceId SimEngine::arrival_interface(const Pcb& pcb, const AsId& receiver) const {
    const HopEntry& last = pcb.hops.back();
    const Link* link = topo_.find_link(last.as_id, last.egress_if);
    if (!link || link->other(last.as_id) != receiver) return kNoInterface;
    return link->if_of_other(last.as_id);
}

std::uint32_t SimEngine::attested_trc_version(const AsRuntime& as) const {
    return as.trcs.current_version(as.id.isd).value_or(1);
}

// One propagation round over one link: select, extend, emit.
void SimEngine::send_pcbs_on_link(AsRuntime& as, const Neighbor& n, SegmentKind kind,
                                  bool only_if_changed) {
    const Link& link = topo_.links()[n.link_index];
    if (!link_up_index(n.link_index)) return;

    auto emit = [&](const std::vector<Pcb>& selected, const std::string& history_key) {
        for (const Pcb& pcb : selected) {
            if (pcb.contains_as(n.peer)) continue;  // would loop at the receiver
            auto extended = extend_pcb(pcb, as.secrets, arrival_interface(pcb, as.id),
                                       n.local_if, live_peer_specs(as.id),
                                       attested_trc_version(as), 1,
                                       policy_.expiry_units);
            if (!extended) continue;
            as.pool.record_sent(history_key, [&] {
                std::set<AsId> hops;
                for (const HopEntry& h : extended->hops) hops.insert(h.as_id);
                return hops;
            }());
            metrics_.add("pcb.sent.total");
            metrics_.add("pcb.sent.link." + link_key(link));
            metrics_.add("pcb.sent.link." + link_key(link) + ".iv" +
                         interval_bucket(now_));
            schedule(now_ + options_.link_latency_us,
                     EvPcb{as.id, n.peer, n.remote_if, *extended});
        }
    };

    if (kind == SegmentKind::Core) {
        auto candidates = as.pool.candidates(SegmentKind::Core, now_, policy_);
        std::vector<AsId> origins;
        for (const PoolEntry* entry : candidates)
            if (origins.empty() || origins.back() != entry->pcb.info.origin)
                origins.push_back(entry->pcb.info.origin);
        for (const AsId& origin : origins) {
            if (origin == as.id) continue;
            std::vector<const PoolEntry*> group;
            for (const PoolEntry* entry : candidates)
                if (entry->pcb.info.origin == origin) group.push_back(entry);
            std::string key = link_key(link) + "|" + origin.to_string();
            auto selected = score_and_select(group, as.pool.sent_history(key), policy_,
                                             SegmentKind::Core, now_, topo_,
                                             policy_.k_inter);
            std::uint64_t digest = selection_digest(selected);
            if (only_if_changed && as.last_sent_topk[key] == digest) continue;
            as.last_sent_topk[key] = digest;
            emit(selected, key);
        }
    } else {
        auto candidates = as.pool.candidates(SegmentKind::Up, now_, policy_);
        std::string key = link_key(link);
        auto selected = score_and_select(candidates, as.pool.sent_history(key), policy_,
                                         SegmentKind::Up, now_, topo_, policy_.k_intra);
        std::uint64_t digest = selection_digest(selected);
        if (only_if_changed && as.last_sent_topk[key] == digest) return;
        as.last_sent_topk[key] = digest;
        emit(selected, key);
    }
}

void SimEngine::on_tick_intra(const EvTickIntra& ev) {
    AsRuntime& as = ases_.at(ev.as);
    if (!ev.immediate) {
        schedule(now_ + policy_.interval_intra_us, EvTickIntra{ev.as, false});
    } else {
        as.pending_immediate_intra = false;
    }
    const AsNode& node = topo_.as_node(ev.as);

    if (!ev.immediate) {
        metrics_.set("pool.size." + ev.as.to_string() + ".iv" + interval_bucket(now_),
                     static_cast<std::int64_t>(
                         as.pool.candidates(SegmentKind::Up, now_, policy_).size()));
    }

    // Core ASes originate one fresh beacon per customer link per ISD;
    // everyone propagates pooled beacons down customer links.
    for (const Neighbor& n : topo_.neighbors(ev.as, NeighborKind::Customer)) {
        if (!link_up_index(n.link_index)) continue;
        const Link& link = topo_.links()[n.link_index];
        if (!ev.immediate) {
            for (IsdId isd : node.core_in) {
                PcbInfo info;
                info.timestamp_s = static_cast<std::uint32_t>(now_ / 1'000'000);
                info.origin = ev.as;
                info.isd = isd;
                info.kind = SegmentKind::Up;
                Pcb pcb = originate_pcb(as.secrets, info, n.local_if,
                                        live_peer_specs(ev.as),
                                        attested_trc_version(as), 1,
                                        policy_.expiry_units);
                metrics_.add("pcb.sent.total");
                metrics_.add("pcb.originated");
                metrics_.add("pcb.sent.link." + link_key(link));
                metrics_.add("pcb.sent.link." + link_key(link) + ".iv" +
                             interval_bucket(now_));
                schedule(now_ + options_.link_latency_us,
                         EvPcb{ev.as, n.peer, n.remote_if, pcb});
            }
        }
        send_pcbs_on_link(as, n, SegmentKind::Up, ev.immediate);
    }

    refresh_segments_and_register(as);
}

void SimEngine::on_tick_inter(const EvTickInter& ev) {
    AsRuntime& as = ases_.at(ev.as);
    const AsNode& node = topo_.as_node(ev.as);
    if (!node.is_core()) return;
    if (!ev.immediate) {
        schedule(now_ + policy_.interval_inter_us, EvTickInter{ev.as, false});
    } else {
        as.pending_immediate_inter = false;
    }

    for (const Neighbor& n : topo_.neighbors(ev.as, NeighborKind::Core)) {
        if (!link_up_index(n.link_index)) continue;
        const Link& link = topo_.links()[n.link_index];
        if (!ev.immediate) {
            for (IsdId isd : node.core_in) {
                PcbInfo info;
                info.timestamp_s = static_cast<std::uint32_t>(now_ / 1'000'000);
                info.origin = ev.as;
                info.isd = isd;
                info.kind = SegmentKind::Core;
                Pcb pcb = originate_pcb(as.secrets, info, n.local_if,
                                        live_peer_specs(ev.as),
                                        attested_trc_version(as), 1,
                                        policy_.expiry_units);
                metrics_.add("pcb.sent.total");
                metrics_.add("pcb.core.originated");
                metrics_.add("pcb.sent.link." + link_key(link));
                metrics_.add("pcb.sent.link." + link_key(link) + ".iv" +
                             interval_bucket(now_));
                schedule(now_ + options_.link_latency_us,
                         EvPcb{ev.as, n.peer, n.remote_if, pcb});
            }
        }
        send_pcbs_on_link(as, n, SegmentKind::Core, ev.immediate);
    }
}

void SimEngine::refresh_segments_and_register(AsRuntime& as) {
    auto candidates = as.pool.candidates(SegmentKind::Up, now_, policy_);
    if (candidates.empty()) return;
    static const std::deque<std::set<AsId>> kNoHistory;
    auto selected = score_and_select(candidates, kNoHistory, policy_, SegmentKind::Up,
                                     now_, topo_, policy_.k_intra);

    std::map<IsdId, std::vector<PathSegment>> down_by_isd;
    for (const Pcb& pcb : selected) {
        auto terminal = extend_pcb(pcb, as.secrets, arrival_interface(pcb, as.id),
                                   kNoInterface, live_peer_specs(as.id),
                                   attested_trc_version(as), 1, policy_.expiry_units);
        if (!terminal) continue;
        PathSegment down = segment_from_pcb(*terminal);
        as.up_store.insert(as.id, invert(down));
        down_by_isd[down.isd].push_back(std::move(down));
    }

    // Down-segment registration at the ISD core, only when the selected
    // shape set changed.
    for (auto& [isd, segments] : down_by_isd) {
        if (topo_.as_node(as.id).is_core_in(isd)) continue;
        std::vector<std::uint64_t> shapes;
        for (const PathSegment& seg : segments) shapes.push_back(seg.shape_digest());
        std::sort(shapes.begin(), shapes.end());
        ByteWriter w;
        for (std::uint64_t shape : shapes) w.u64(shape);
        std::uint64_t digest = fnv1a64(w.bytes());
        if (as.registered_shape_digest[isd] == digest) continue;
        as.registered_shape_digest[isd] = digest;

        auto cores = topo_.core_ases(isd);
        if (cores.empty()) continue;
        auto latency = control_latency(as.id, cores.front());
        if (!latency) {
            metrics_.add("register.unreachable");
            as.registered_shape_digest[isd] = 0;  // retry next round
            continue;
        }
        metrics_.add("register.sent");
        metrics_.add("register.churn." + as.id.to_string());
        // Certificates ride along with the registration, the same direction
        // as the routing data they authenticate.
        std::vector<AsCert> certs;
        std::set<AsId> subjects;
        for (const PathSegment& seg : segments)
            for (const SegmentHop& hop : seg.hops) subjects.insert(hop.as_id);
        for (const AsId& subject : subjects)
            if (const AsCert* cert = as.certs.get(subject)) certs.push_back(*cert);
        schedule(now_ + *latency, EvRegister{as.id, isd, segments, std::move(certs)});
    }
}

void SimEngine::on_pcb(const EvPcb& ev, bool replay) {
    AsRuntime& as = ases_.at(ev.to);
    if (!replay) metrics_.add("pcb.received");

    PcbValidationOptions options;
    options.arrival = std::make_pair(ev.to, ev.to_if);
    PcbVerdict verdict = validate_pcb(ev.pcb, as.trcs, as.certs, topo_, now_, options);

    if (verdict.status == PcbStatus::NeedsTrc) {
        as.pending_pcbs.push_back(PendingPcb{ev.pcb, ev.from, ev.to_if});
        auto key = std::make_pair(verdict.needs_isd, verdict.needs_version);
        if (!as.trc_fetches_outstanding.count(key)) {
            as.trc_fetches_outstanding.insert(key);
            metrics_.add("trc.fetch.requests");
            auto latency = control_latency(ev.to, ev.from);
            if (latency)
                schedule(now_ + *latency,
                         EvTrcRequest{ev.to, ev.from, verdict.needs_isd,
                                      verdict.needs_version});
        }
        return;
    }
    if (verdict.status == PcbStatus::Invalid) {
        if (verdict.reason == "cert unavailable") {
            // Certificates travel the same way beacons do: fetch the missing
            // ones from the sender, who validated this beacon and therefore
            // holds them.
            std::vector<AsId> missing;
            for (const HopEntry& hop : ev.pcb.hops) {
                if (as.certs.get(hop.as_id)) continue;
                if (as.cert_fetches_outstanding.count(hop.as_id)) continue;
                missing.push_back(hop.as_id);
            }
            if (replay && missing.empty()) {
                // Already fetched once and the issuer could not provide it.
                metrics_.add("pcb.invalid." + verdict.reason);
                return;
            }
            as.pending_pcbs.push_back(PendingPcb{ev.pcb, ev.from, ev.to_if});
            if (!missing.empty()) {
                for (const AsId& subject : missing)
                    as.cert_fetches_outstanding.insert(subject);
                metrics_.add("cert.fetch.requests");
                auto latency = control_latency(ev.to, ev.from);
                if (latency)
                    schedule(now_ + *latency, EvCertRequest{ev.to, ev.from, missing});
            }
            return;
        }
        metrics_.add("pcb.invalid." + verdict.reason);
        return;
    }
    if (verdict.stale_trc_seen) metrics_.add("trc.stale_validation");

    bool changed = as.pool.insert(ev.pcb, now_);
    if (ev.pcb.info.kind == SegmentKind::Core) {
        const AsNode& node = topo_.as_node(ev.to);
        if (node.is_core()) {
            // Consume into the per-ISD core store with a terminal extension.
            auto terminal = extend_pcb(ev.pcb, as.secrets, ev.to_if, kNoInterface, {},
                                       attested_trc_version(as), 1,
                                       policy_.expiry_units);
            if (terminal) {
                PathSegment seg = segment_from_pcb(*terminal);
                for (IsdId isd : node.core_in)
                    core_ps_.at(isd).core_store.insert(seg.origin, seg);
            }
            if (changed && !as.pending_immediate_inter) {
                as.pending_immediate_inter = true;
                schedule(now_ + 100'000, EvTickInter{ev.to, true});
            }
        }
    }
}

void SimEngine::on_trc_request(const EvTrcRequest& ev) {
    AsRuntime& as = ases_.at(ev.to);
    metrics_.add("trc.fetch.served");
    std::vector<Trc> trcs;
    for (std::uint32_t v = 1; v <= ev.want_version; ++v) {
        const Trc* trc = as.trcs.get(ev.isd, v);
        if (trc) trcs.push_back(*trc);
    }
    auto latency = control_latency(ev.to, ev.from);
    if (latency) schedule(now_ + *latency, EvTrcReply{ev.to, ev.from, std::move(trcs)});
}

void SimEngine::on_trc_reply(const EvTrcReply& ev) {
    AsRuntime& as = ases_.at(ev.to);
    for (const Trc& trc : ev.trcs) {
        TrcUpdateResult result = as.trcs.update(trc);
        if (result == TrcUpdateResult::Accepted) {
            metrics_.add("trc.installed");
            auto key = std::make_pair(trc.isd, trc.version);
            as.trc_fetches_outstanding.erase(key);
            // Propagation bookkeeping: note when the whole membership holds
            // this version.
            auto injected = trc_injected_at_.find(key);
            if (injected != trc_injected_at_.end()) {
                bool complete = true;
                for (const AsId& member : topo_.members_of(trc.isd)) {
                    auto version = ases_.at(member).trcs.current_version(trc.isd);
                    if (!version || *version < trc.version) {
                        complete = false;
                        break;
                    }
                }
                std::string key_name = "trc.propagated_us.isd" +
                                       std::to_string(trc.isd) + ".v" +
                                       std::to_string(trc.version);
                if (complete && !metrics_.has(key_name))
                    metrics_.set(key_name, now_ - injected->second);
            }
        } else if (result != TrcUpdateResult::RejectedStale) {
            metrics_.add("trc.install_rejected");
        }
    }

    std::vector<PendingPcb> pending;
    pending.swap(as.pending_pcbs);
    for (PendingPcb& p : pending)
        on_pcb(EvPcb{p.from, as.id, p.to_if, std::move(p.pcb)}, /*replay=*/true);
}

void SimEngine::on_cert_request(const EvCertRequest& ev) {
    AsRuntime& as = ases_.at(ev.to);
    metrics_.add("cert.fetch.served");
    std::vector<AsCert> certs;
    for (const AsId& subject : ev.subjects) {
        if (const AsCert* cert = as.certs.get(subject)) certs.push_back(*cert);
    }
    auto latency = control_latency(ev.to, ev.from);
    if (latency) schedule(now_ + *latency, EvCertReply{ev.to, ev.from, std::move(certs)});
}

void SimEngine::on_cert_reply(const EvCertReply& ev) {
    AsRuntime& as = ases_.at(ev.to);
    for (const AsCert& cert : ev.certs) {
        as.cert_fetches_outstanding.erase(cert.subject);
        // Verified on use; the store is only a cache.
        if (!as.certs.get(cert.subject)) as.certs.put(cert);
    }
    std::vector<PendingPcb> pending;
    pending.swap(as.pending_pcbs);
    for (PendingPcb& p : pending)
        on_pcb(EvPcb{p.from, as.id, p.to_if, std::move(p.pcb)}, /*replay=*/true);
}

void SimEngine::on_drkey_request(const EvDrkeyRequest& ev) {
    AsRuntime& origin = ases_.at(ev.to);
    metrics_.add("drkey.exchanges");
    DrKey key = derive_drkey(origin.secrets, ev.from);
    ByteWriter w;
    w.str("DRKY");
    w.as_id(key.from_as);
    w.as_id(key.to_as);
    w.raw(key.key);
    Signature sig = sign(origin.secrets.signing.private_key, w.bytes());
    auto latency = control_latency(ev.to, ev.from);
    if (latency) schedule(now_ + *latency, EvDrkeyReply{ev.to, ev.from, key, sig});
}

void SimEngine::on_drkey_reply(const EvDrkeyReply& ev) {
    AsRuntime& as = ases_.at(ev.to);
    as.drkey_fetches_outstanding.erase(ev.from);

    if (const AsCert* cert = as.certs.get(ev.from)) {
        ByteWriter w;
        w.str("DRKY");
        w.as_id(ev.key.from_as);
        w.as_id(ev.key.to_as);
        w.raw(ev.key.key);
        if (!VerifyMemo::verify(cert->public_key, w.bytes(), ev.signature)) {
            metrics_.add("drkey.bad_signature");
            return;
        }
    }
    DrKey key = ev.key;
    key.fetched_at_us = now_;
    as.drkeys.insert(key);

    auto it = as.quarantined.find(ev.from);
    if (it == as.quarantined.end()) return;
    std::vector<PendingScmp> pending;
    pending.swap(it->second);
    as.quarantined.erase(it);
    for (const PendingScmp& p : pending) {
        if (scmp_tag_valid(key, p.msg)) {
            process_revocation(as, p.msg);
        } else {
            metrics_.add("scmp.bad_proof");
        }
    }
}

void SimEngine::on_revoke(const EvRevoke& ev) {
    AsRuntime& as = ases_.at(ev.to);
    auto seen_key = std::make_tuple(ev.msg.subject_as, ev.msg.subject_if,
                                    ev.msg.timestamp_us);
    if (as.revocations_seen.count(seen_key)) return;
    as.revocations_seen.insert(seen_key);

    // Only the interface owner may revoke it.
    if (ev.msg.issuer != ev.msg.subject_as) {
        metrics_.add("scmp.bad_proof");
        return;
    }
    if (ev.msg.issuer == as.id) {
        // Allegedly our own message: the tag must verify under our own
        // derived key, or someone is spoofing us.
        if (scmp_tag_valid(derive_drkey(as.secrets, as.id), ev.msg)) {
            process_revocation(as, ev.msg);
        } else {
            metrics_.add("scmp.bad_proof");
        }
        return;
    }
    if (auto key = as.drkeys.lookup(ev.msg.issuer, now_)) {
        if (scmp_tag_valid(*key, ev.msg)) {
            process_revocation(as, ev.msg);
        } else {
            metrics_.add("scmp.bad_proof");
        }
        return;
    }
    as.quarantined[ev.msg.issuer].push_back(PendingScmp{ev.msg});
    if (!as.drkey_fetches_outstanding.count(ev.msg.issuer)) {
        auto latency = control_latency(as.id, ev.msg.issuer);
        if (!latency) {
            metrics_.add("scmp.unverifiable");
            return;
        }
        as.drkey_fetches_outstanding.insert(ev.msg.issuer);
        schedule(now_ + *latency, EvDrkeyRequest{as.id, ev.msg.issuer});
    }
}

void SimEngine::process_revocation(AsRuntime& as, const ScmpMessage& msg) {
    metrics_.add("revocation.processed");
    std::size_t purged = 0;
    purged += as.pool.purge_interface(msg.subject_as, msg.subject_if);
    purged += as.up_store.purge_interface(msg.subject_as, msg.subject_if);

    for (auto it = as.lookup_cache.begin(); it != as.lookup_cache.end();) {
        bool hit = false;
        for (const auto* list : {&it->second.reply.up, &it->second.reply.core,
                                 &it->second.reply.down}) {
            for (const PathSegment& seg : *list)
                if (seg.uses_interface(msg.subject_as, msg.subject_if)) hit = true;
        }
        if (hit) {
            it = as.lookup_cache.erase(it);
            ++purged;
        } else {
            ++it;
        }
    }

    for (IsdId isd : topo_.as_node(as.id).core_in) {
        CorePs& cps = core_ps_.at(isd);
        purged += cps.down_store.purge_interface(msg.subject_as, msg.subject_if);
        purged += cps.core_store.purge_interface(msg.subject_as, msg.subject_if);
        for (auto it = cps.remote_cache.begin(); it != cps.remote_cache.end();) {
            bool hit = false;
            for (const PathSegment& seg : it->second.reply.down)
                if (seg.uses_interface(msg.subject_as, msg.subject_if)) hit = true;
            if (hit) {
                it = cps.remote_cache.erase(it);
                ++purged;
            } else {
                ++it;
            }
        }
    }
    metrics_.add("revocation.purged", static_cast<std::int64_t>(purged));

    // Registered copies may have been purged at the core store; force a
    // fresh upload on the next round even if the local selection is
    // unchanged.
    as.registered_shape_digest.clear();

    if (purged > 0) {
        if (!as.pending_immediate_intra) {
            as.pending_immediate_intra = true;
            schedule(now_ + 100'000, EvTickIntra{as.id, true});
        }
        if (topo_.as_node(as.id).is_core() && !as.pending_immediate_inter) {
            as.pending_immediate_inter = true;
            schedule(now_ + 100'000, EvTickInter{as.id, true});
        }
    }

    // Hosts holding paths over the revoked interface switch over.
    for (FlowState& flow : flows_) {
        if (flow.spec.src_as != as.id || flow.status != FlowStatus::Active) continue;
        bool active_hit = false;
        for (std::size_t i = 0; i < flow.paths.size(); ++i) {
            bool uses = false;
            for (const PathSlice& slice : flow.paths[i].path.slices) {
                for (const PathHop& hop : slice.hops) {
                    if (hop.as == msg.subject_as &&
                        (hop.ingress_if == msg.subject_if ||
                         hop.egress_if == msg.subject_if))
                        uses = true;
                }
            }
            if (uses) {
                flow.paths[i].alive = false;
                if (i == flow.active) active_hit = true;
            }
        }
        if (active_hit) flow_failover(flow, "revocation");
    }
}

void SimEngine::flood_revocation(const AsId& issuer, InterfaceId ifid) {
    AsRuntime& as = ases_.at(issuer);
    if (as.flooded_revocations.count(ifid)) return;
    as.flooded_revocations.insert(ifid);

    SimTime stamp = now_;
    ScmpMessage own = scmp_auth(as.secrets, ScmpType::RevokeInterface, issuer, ifid,
                                stamp, issuer);
    on_revoke(EvRevoke{issuer, own});

    for (const auto& [id, rt] : ases_) {
        if (id == issuer) continue;
        auto latency = control_latency(issuer, id);
        if (!latency) continue;
        ScmpMessage msg = scmp_auth(as.secrets, ScmpType::RevokeInterface, issuer,
                                    ifid, stamp, id);
        metrics_.add("scmp.sent.revoke");
        schedule(now_ + *latency, EvRevoke{id, msg});
    }
}

// ---- path lookup ----------------------------------------------------------

void SimEngine::start_lookup(std::uint64_t id, const AsId& src, const AsId& dst) {
    AsRuntime& as = ases_.at(src);
    PendingLookup& pending = pending_lookups_.at(id);

    LookupReply ups_only;
    ups_only.up = as.up_store.query(src, now_, kLookupK);
    bool src_core = topo_.as_node(src).is_core();
    if (ups_only.up.empty() && !src_core) {
        complete_lookup(id, {}, "isolated");
        return;
    }
    if (src == dst) {
        complete_lookup(id, std::move(ups_only), "");
        return;
    }

    if (options_.cache_enabled) {
        auto hit = as.lookup_cache.find(dst);
        if (hit != as.lookup_cache.end() && hit->second.expires_us > now_) {
            metrics_.add("lookup.cache_hits");
            LookupReply reply = hit->second.reply;
            reply.up = ups_only.up;  // up segments are local and fresh
            complete_lookup(id, std::move(reply), "");
            return;
        }
    }

    IsdId isd = src.isd;
    auto cores = topo_.core_ases(isd);
    if (cores.empty()) {
        complete_lookup(id, {}, "isolated");
        return;
    }
    for (const PathSegment& u : ups_only.up)
        pending.up_terminals.push_back(u.core_as());
    if (src_core) pending.up_terminals.push_back(src);
    std::sort(pending.up_terminals.begin(), pending.up_terminals.end());
    pending.up_terminals.erase(
        std::unique(pending.up_terminals.begin(), pending.up_terminals.end()),
        pending.up_terminals.end());

    auto latency = control_latency(src, cores.front());
    if (!latency) {
        complete_lookup(id, {}, "lookup timeout");
        return;
    }
    metrics_.add("lookup.messages");
    schedule(now_ + *latency, EvLookupRequest{id, src, cores.front(), isd, dst,
                                              pending.up_terminals});
}

namespace {

std::vector<PathSegment> core_segments_for(const SegmentStore& core_store,
                                           const std::vector<AsId>& terminals,
                                           const std::set<AsId>& starts,
                                           SimTime now) {
    std::vector<PathSegment> out;
    for (const PathSegment* seg : core_store.all()) {
        if (now >= seg->expiry_us()) continue;
        bool terminal_match =
            std::find(terminals.begin(), terminals.end(), seg->last_as()) !=
            terminals.end();
        bool origin_match =
            std::find(terminals.begin(), terminals.end(), seg->first_as()) !=
            terminals.end();
        if ((terminal_match && starts.count(seg->first_as())) ||
            (origin_match && starts.count(seg->last_as())))
            out.push_back(*seg);
    }
    std::sort(out.begin(), out.end(), [](const PathSegment& a, const PathSegment& b) {
        return std::make_tuple(a.hops.size(), a.shape_digest()) <
               std::make_tuple(b.hops.size(), b.shape_digest());
    });
    if (out.size() > kLookupK) out.resize(kLookupK);
    return out;
}

}  // namespace

void SimEngine::on_lookup_request(const EvLookupRequest& ev) {
    CorePs& cps = core_ps_.at(ev.isd);
    PendingLookup& pending = pending_lookups_.at(ev.id);

    std::vector<PathSegment> downs = cps.down_store.query(ev.target, now_, kLookupK);
    bool target_is_local_core =
        topo_.has_as(ev.target) && topo_.as_node(ev.target).is_core_in(ev.isd);

    if (!downs.empty() || target_is_local_core) {
        LookupReply reply;
        reply.down = downs;
        std::set<AsId> starts;
        for (const PathSegment& d : downs) starts.insert(d.core_as());
        if (target_is_local_core) starts.insert(ev.target);
        reply.core = core_segments_for(cps.core_store, ev.up_terminals, starts, now_);
        metrics_.add("lookup.messages");
        auto latency = control_latency(ev.core, ev.from);
        if (latency) schedule(now_ + *latency, EvLookupReply{ev.id, ev.from, reply, ""});
        return;
    }

    if (!topo_.has_as(ev.target)) {
        metrics_.add("lookup.messages");
        auto latency = control_latency(ev.core, ev.from);
        if (latency)
            schedule(now_ + *latency, EvLookupReply{ev.id, ev.from, {}, "no such AS"});
        return;
    }

    IsdId remote = ev.target.isd;
    if (remote == ev.isd) {
        // Known AS, no registrations yet: an empty reply, not an error.
        metrics_.add("lookup.messages");
        auto latency = control_latency(ev.core, ev.from);
        if (latency) schedule(now_ + *latency, EvLookupReply{ev.id, ev.from, {}, ""});
        return;
    }

    // Cross-ISD resolution.
    auto cached = cps.remote_cache.find(ev.target);
    if (options_.cache_enabled && cached != cps.remote_cache.end() &&
        cached->second.expires_us > now_) {
        metrics_.add("lookup.remote_cache_hits");
        LookupReply reply;
        reply.down = cached->second.reply.down;
        std::set<AsId> starts;
        for (const PathSegment& d : reply.down) starts.insert(d.core_as());
        reply.core = core_segments_for(cps.core_store, ev.up_terminals, starts, now_);
        metrics_.add("lookup.messages");
        auto latency = control_latency(ev.core, ev.from);
        if (latency) schedule(now_ + *latency, EvLookupReply{ev.id, ev.from, reply, ""});
        return;
    }

    // Pick the closest remote core over a learned core segment.
    std::vector<const PathSegment*> routes;
    for (const PathSegment* seg : cps.core_store.all()) {
        if (now_ >= seg->expiry_us()) continue;
        if (topo_.has_as(seg->first_as()) &&
            topo_.as_node(seg->first_as()).is_core_in(remote))
            routes.push_back(seg);
    }
    if (routes.empty()) {
        metrics_.add("lookup.messages");
        auto latency = control_latency(ev.core, ev.from);
        if (latency)
            schedule(now_ + *latency, EvLookupReply{ev.id, ev.from, {}, "lookup timeout"});
        return;
    }
    std::sort(routes.begin(), routes.end(),
              [](const PathSegment* a, const PathSegment* b) {
                  return std::make_tuple(a->hops.size(), a->shape_digest()) <
                         std::make_tuple(b->hops.size(), b->shape_digest());
              });
    AsId remote_core = routes.front()->first_as();
    pending.partial = {};  // reply assembled on the way back
    metrics_.add("lookup.messages");
    auto latency = control_latency(ev.core, remote_core);
    if (!latency) {
        auto back = control_latency(ev.core, ev.from);
        if (back)
            schedule(now_ + *back, EvLookupReply{ev.id, ev.from, {}, "lookup timeout"});
        return;
    }
    schedule(now_ + *latency,
             EvCoreQuery{ev.id, ev.isd, remote, ev.core, remote_core, ev.target});
}

void SimEngine::on_core_query(const EvCoreQuery& ev) {
    CorePs& cps = core_ps_.at(ev.to_isd);
    metrics_.add("lookup.messages");
    EvCoreReply reply;
    reply.id = ev.id;
    reply.at_isd = ev.from_isd;
    reply.downs = cps.down_store.query(ev.target, now_, kLookupK);
    if (reply.downs.empty() && !topo_.has_as(ev.target)) reply.error = "no such AS";
    auto latency = control_latency(ev.to_core, ev.from_core);
    if (latency) schedule(now_ + *latency, reply);
}

void SimEngine::on_core_reply(const EvCoreReply& ev) {
    auto it = pending_lookups_.find(ev.id);
    if (it == pending_lookups_.end()) return;
    PendingLookup& pending = it->second;
    CorePs& cps = core_ps_.at(pending.requester.isd);
    AsId core = topo_.core_ases(pending.requester.isd).front();

    if (!ev.error.empty()) {
        metrics_.add("lookup.messages");
        auto latency = control_latency(core, pending.requester);
        if (latency)
            schedule(now_ + *latency,
                     EvLookupReply{ev.id, pending.requester, {}, ev.error});
        return;
    }

    if (options_.cache_enabled && !ev.downs.empty()) {
        SimTime expiry = std::numeric_limits<SimTime>::max();
        for (const PathSegment& seg : ev.downs)
            expiry = std::min(expiry, seg.expiry_us());
        CachedLookup cached;
        cached.reply.down = ev.downs;
        cached.expires_us = expiry;
        cps.remote_cache[pending.target] = std::move(cached);
    }

    LookupReply reply;
    reply.down = ev.downs;
    std::set<AsId> starts;
    for (const PathSegment& d : reply.down) starts.insert(d.core_as());
    reply.core = core_segments_for(cps.core_store, pending.up_terminals, starts, now_);
    metrics_.add("lookup.messages");
    auto latency = control_latency(core, pending.requester);
    if (latency)
        schedule(now_ + *latency, EvLookupReply{ev.id, pending.requester, reply, ""});
}

void SimEngine::on_lookup_reply(const EvLookupReply& ev) {
    auto it = pending_lookups_.find(ev.id);
    if (it == pending_lookups_.end()) return;
    AsRuntime& as = ases_.at(ev.to);

    LookupReply reply = ev.reply;
    reply.up = as.up_store.query(ev.to, now_, kLookupK);

    if (ev.error.empty() && options_.cache_enabled && !reply.empty()) {
        SimTime expiry = std::numeric_limits<SimTime>::max();
        for (const auto* list : {&reply.up, &reply.core, &reply.down})
            for (const PathSegment& seg : *list)
                expiry = std::min(expiry, seg.expiry_us());
        CachedLookup cached;
        cached.reply = reply;
        cached.expires_us = expiry;
        as.lookup_cache[it->second.target] = std::move(cached);
    }
    complete_lookup(ev.id, std::move(reply), ev.error);
}

void SimEngine::on_register(const EvRegister& ev) {
    CorePs& cps = core_ps_.at(ev.isd);
    AsRuntime& view = ases_.at(topo_.core_ases(ev.isd).front());
    metrics_.add("register.received");
    for (const AsCert& cert : ev.certs)
        if (!view.certs.get(cert.subject)) view.certs.put(cert);
    for (const PathSegment& seg : ev.segments) {
        if (seg.kind != SegmentKind::Down || seg.leaf_as() != ev.from ||
            now_ >= seg.expiry_us()) {
            metrics_.add("register.rejected");
            continue;
        }
        PcbVerdict verdict = validate_segment(seg, view.trcs, view.certs, topo_, now_);
        if (!verdict.valid()) {
            metrics_.add("register.rejected");
            continue;
        }
        cps.down_store.insert(ev.from, seg);
        metrics_.add("register.accepted");
    }
}

void SimEngine::complete_lookup(std::uint64_t id, LookupReply reply, std::string error) {
    auto it = pending_lookups_.find(id);
    if (it == pending_lookups_.end()) return;
    int flow_id = it->second.flow_id;
    pending_lookups_.erase(it);
    if (flow_id < 0) return;

    FlowState& flow = flows_.at(static_cast<std::size_t>(flow_id));
    flow.pending_lookup.reset();
    if (!error.empty()) {
        std::string label = error == "isolated" ? "isolated"
                            : error == "no such AS" ? "no_such_as"
                                                    : "timeout";
        metrics_.add("flow." + std::to_string(flow_id) + ".lookup_error." + label);
        if (flow.status == FlowStatus::WaitingPath)
            schedule(now_ + kSecond, EvFlowRetry{flow_id});
        return;
    }
    flow_adopt_paths(flow, reply);
}

}  // namespace scion::sim
