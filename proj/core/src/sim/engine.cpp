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

#include "scion/sim/engine.hpp"

#include <algorithm>
#include <cassert>
#include <deque>

namespace scion::sim {

SimEngine::SimEngine(Scenario scenario)
    : scenario_(std::move(scenario)),
      topo_(scenario_.resolve_topology()),
      policy_(scenario_.options.policy),
      options_(scenario_.options),
      rng_(scenario_.seed) {
    bootstrap();
}

void SimEngine::bootstrap() {
    link_up_.assign(topo_.links().size(), true);

    // Trust roots and v1 TRCs per ISD, cross-signed along every ISD
    // adjacency before distribution.
    std::map<IsdId, Trc> v1;
    for (IsdId isd : topo_.isds()) {
        TrcConfig cfg = options_.trc_config(isd);
        std::vector<KeyPair>& roots = roots_[isd];
        Trc trc;
        trc.isd = isd;
        trc.version = 1;
        trc.quorum_cert = cfg.quorum_cert;
        trc.quorum_trc = cfg.quorum_trc;
        for (std::uint16_t i = 0; i < cfg.roots; ++i) {
            roots.push_back(KeyPair::from_seed(expand_seed(
                scenario_.seed, "root/" + std::to_string(isd) + "/" + std::to_string(i))));
            trc.trust_roots.emplace_back("root-" + std::to_string(i),
                                         roots.back().public_key);
        }
        for (std::uint16_t i = 0; i < cfg.roots; ++i)
            trc.add_signature(i, roots[i].private_key);
        v1.emplace(isd, std::move(trc));
    }
    auto adjacency = topo_.isd_adjacency();
    for (auto& [isd, trc] : v1) {
        for (const auto& [a, b] : adjacency) {
            IsdId other = (a == isd) ? b : (b == isd ? a : 0);
            if (other == 0) continue;
            cross_sign(trc, other, 0, roots_[other][0].private_key, topo_);
        }
    }
    latest_trc_ = v1;

    // Per-AS secrets and certificates.
    std::int64_t cert_end_s = scenario_.duration_us / 1'000'000 + 86'400;
    std::map<AsId, AsCert> certs;
    for (const auto& [id, node] : topo_.ases()) {
        AsRuntime rt;
        rt.id = id;
        rt.secrets = AsSecrets::derive(id, scenario_.seed);

        AsCert cert;
        cert.subject = id;
        cert.public_key = rt.secrets.signing.public_key;
        cert.not_before_s = 0;
        cert.not_after_s = cert_end_s;
        cert.trc_version = 1;
        const Trc& home = v1.at(id.isd);
        for (std::uint16_t i = 0; i < home.quorum_cert; ++i)
            cert.add_signature(i, roots_[id.isd][i].private_key);
        certs.emplace(id, cert);

        ases_.emplace(id, std::move(rt));
    }

    for (auto& [id, rt] : ases_) {
        // Member ISDs' TRCs are accepted axiomatically (joining an ISD means
        // accepting its trust roots); every other ISD's TRC is installed
        // after cross-signature chain verification from the home ISD.
        for (IsdId isd : topo_.as_node(id).member_of) rt.trcs.bootstrap(v1.at(isd));
        for (const auto& [isd, trc] : v1) {
            if (rt.trcs.latest(isd)) continue;
            if (verify_trc_chain(id.isd, isd, v1, adjacency)) {
                rt.trcs.bootstrap(trc);
            } else {
                metrics_.add("trc.chain_unverified");
            }
        }
        if (options_.prefill_certs) {
            for (const auto& [subject, cert] : certs) rt.certs.put(cert);
        } else {
            rt.certs.put(certs.at(id));
        }
    }

    for (IsdId isd : topo_.isds()) core_ps_.emplace(isd, CorePs{});

    // Timers: every AS beacons on the intra cadence, cores also on the core
    // cadence, phase-aligned at t=0.
    for (const auto& [id, node] : topo_.ases()) {
        schedule(0, EvTickIntra{id});
        if (node.is_core()) schedule(0, EvTickInter{id, false});
    }

    for (std::size_t i = 0; i < scenario_.directives.size(); ++i) {
        schedule(scenario_.directives[i].at_us, EvDirective{i});
        if (const auto* fl =
                std::get_if<FailLinkDirective>(&scenario_.directives[i].action)) {
            if (!topo_.find_link_by_id(fl->link_id))
                throw ValidationError("fail-link references unknown link " + fl->link_id);
        }
    }

    for (const FlowSpec& spec : scenario_.flows) {
        if (!topo_.has_as(spec.src_as) || !topo_.has_as(spec.dst_as))
            throw ValidationError("flow references unknown AS");
        FlowState flow;
        flow.spec = spec;
        if (flow.spec.until_us == 0) flow.spec.until_us = scenario_.duration_us;
        flows_.push_back(std::move(flow));
        schedule(spec.start_us, EvFlowTick{spec.id});
    }
}

void SimEngine::schedule(SimTime at, EventPayload payload) {
    assert(at >= now_);
    queue_.push(Event{at < now_ ? now_ : at, next_event_seq_++, std::move(payload)});
}

Metrics& SimEngine::run() {
    if (ran_) return metrics_;
    ran_ = true;
    // The clock runs over [0, duration).
    while (!queue_.empty()) {
        Event event = queue_.top();
        if (event.time >= scenario_.duration_us) break;
        queue_.pop();
        now_ = event.time;
        dispatch(event);
    }
    now_ = scenario_.duration_us;
    finalize_metrics();
    return metrics_;
}

void SimEngine::dispatch(const Event& event) {
    std::visit(
        [this](const auto& ev) {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, EvTickIntra>) on_tick_intra(ev);
            else if constexpr (std::is_same_v<T, EvTickInter>) on_tick_inter(ev);
            else if constexpr (std::is_same_v<T, EvPcb>) on_pcb(ev);
            else if constexpr (std::is_same_v<T, EvTrcRequest>) on_trc_request(ev);
            else if constexpr (std::is_same_v<T, EvTrcReply>) on_trc_reply(ev);
            else if constexpr (std::is_same_v<T, EvDrkeyRequest>) on_drkey_request(ev);
            else if constexpr (std::is_same_v<T, EvDrkeyReply>) on_drkey_reply(ev);
            else if constexpr (std::is_same_v<T, EvCertRequest>) on_cert_request(ev);
            else if constexpr (std::is_same_v<T, EvCertReply>) on_cert_reply(ev);
            else if constexpr (std::is_same_v<T, EvLookupRequest>) on_lookup_request(ev);
            else if constexpr (std::is_same_v<T, EvCoreQuery>) on_core_query(ev);
            else if constexpr (std::is_same_v<T, EvCoreReply>) on_core_reply(ev);
            else if constexpr (std::is_same_v<T, EvLookupReply>) on_lookup_reply(ev);
            else if constexpr (std::is_same_v<T, EvRegister>) on_register(ev);
            else if constexpr (std::is_same_v<T, EvRevoke>) on_revoke(ev);
            else if constexpr (std::is_same_v<T, EvPacket>) on_packet(ev);
            else if constexpr (std::is_same_v<T, EvHostPacket>) on_host_packet(ev);
            else if constexpr (std::is_same_v<T, EvFlowTick>) on_flow_tick(ev);
            else if constexpr (std::is_same_v<T, EvAckTimeout>) on_ack_timeout(ev);
            else if constexpr (std::is_same_v<T, EvFlowRetry>) on_flow_retry(ev);
            else if constexpr (std::is_same_v<T, EvDirective>) apply_directive(ev.index);
            else if constexpr (std::is_same_v<T, EvLinkRestore>) restore_link(ev.link_index);
            else if constexpr (std::is_same_v<T, EvAttackPulse>) on_attack_pulse(ev);
        },
        event.payload);
}

void SimEngine::apply_directive(std::size_t index) {
    const Directive& directive = scenario_.directives[index];
    if (const auto* fl = std::get_if<FailLinkDirective>(&directive.action)) {
        const Link* link = topo_.find_link_by_id(fl->link_id);
        std::size_t link_index =
            static_cast<std::size_t>(link - topo_.links().data());
        fail_link(link_index);
        if (fl->restore_at) schedule(*fl->restore_at, EvLinkRestore{link_index});
    } else if (const auto* at = std::get_if<AttackDirective>(&directive.action)) {
        attacks_.push_back(*at);
        if (ases_.count(at->adversary)) ases_.at(at->adversary).adversary = true;
        schedule(now_, EvAttackPulse{attacks_.size() - 1});
    } else if (const auto* tu = std::get_if<TrcUpdateDirective>(&directive.action)) {
        apply_trc_update(*tu);
    }
}

void SimEngine::fail_link(std::size_t link_index) {
    link_up_[link_index] = false;
    metrics_.add("link.failures");
}

void SimEngine::restore_link(std::size_t link_index) {
    link_up_[link_index] = true;
    metrics_.add("link.restores");
    const Link& link = topo_.links()[link_index];
    for (const AsId& end : {link.a, link.b}) {
        auto it = ases_.find(end);
        if (it != ases_.end())
            it->second.flooded_revocations.erase(link.if_of(end));
    }
}

bool SimEngine::link_up_at(const AsId& as, InterfaceId ifid) const {
    const Link* link = topo_.find_link(as, ifid);
    if (!link) return false;
    return link_up_[static_cast<std::size_t>(link - topo_.links().data())];
}

std::optional<SimTime> SimEngine::control_latency(const AsId& from, const AsId& to) const {
    if (from == to) return options_.local_latency_us;
    // Shortest live-link hop count; control messages ride the shortest
    // working route.
    std::map<AsId, int> dist;
    std::deque<AsId> frontier{from};
    dist[from] = 0;
    while (!frontier.empty()) {
        AsId cur = frontier.front();
        frontier.pop_front();
        if (cur == to) break;
        for (const auto& [ifid, end] : topo_.as_node(cur).interfaces) {
            if (!link_up_[end.link_index]) continue;
            if (dist.count(end.peer)) continue;
            dist[end.peer] = dist[cur] + 1;
            frontier.push_back(end.peer);
        }
    }
    auto it = dist.find(to);
    if (it == dist.end()) return std::nullopt;
    return it->second * options_.link_latency_us + options_.local_latency_us;
}

void SimEngine::apply_trc_update(const TrcUpdateDirective& directive) {
    auto latest = latest_trc_.find(directive.isd);
    if (latest == latest_trc_.end()) {
        metrics_.add("trc.update.rejected");
        return;
    }
    const Trc& previous = latest->second;
    Trc next;
    next.isd = directive.isd;
    next.version = directive.version;
    next.quorum_cert = directive.quorum_cert.value_or(previous.quorum_cert);
    next.quorum_trc = directive.quorum_trc.value_or(previous.quorum_trc);

    std::vector<KeyPair> next_roots = roots_.at(directive.isd);
    for (std::uint16_t index : directive.rotate) {
        if (index >= next_roots.size()) continue;
        next_roots[index] = KeyPair::from_seed(expand_seed(
            scenario_.seed, "root/" + std::to_string(directive.isd) + "/" +
                                std::to_string(index) + "/v" +
                                std::to_string(directive.version)));
    }
    for (std::size_t i = 0; i < next_roots.size(); ++i)
        next.trust_roots.emplace_back("root-" + std::to_string(i),
                                      next_roots[i].public_key);

    const std::vector<KeyPair>& prev_roots = roots_.at(directive.isd);
    std::uint16_t signers =
        std::min<std::uint16_t>(directive.signer_count,
                                static_cast<std::uint16_t>(prev_roots.size()));
    for (std::uint16_t i = 0; i < signers; ++i)
        next.add_signature(i, prev_roots[i].private_key);

    for (const auto& [a, b] : topo_.isd_adjacency()) {
        IsdId other = (a == directive.isd) ? b : (b == directive.isd ? a : 0);
        if (other == 0) continue;
        cross_sign(next, other, 0, roots_.at(other)[0].private_key, topo_);
    }

    bool accepted = false;
    for (const AsId& core : topo_.core_ases(directive.isd)) {
        TrcUpdateResult result = ases_.at(core).trcs.update(next);
        if (result == TrcUpdateResult::Accepted) accepted = true;
    }
    if (!accepted) {
        metrics_.add("trc.update.rejected");
        return;
    }
    metrics_.add("trc.update.accepted");
    latest_trc_[directive.isd] = next;
    roots_[directive.isd] = next_roots;
    trc_injected_at_[{directive.isd, directive.version}] = now_;
}

void SimEngine::finalize_metrics() {
    for (const FlowState& flow : flows_) {
        std::string prefix = "flow." + std::to_string(flow.spec.id) + ".";
        metrics_.set(prefix + "sent", static_cast<std::int64_t>(flow.sent));
        metrics_.set(prefix + "delivered", static_cast<std::int64_t>(flow.delivered));
        metrics_.set(prefix + "switchovers", static_cast<std::int64_t>(flow.switchovers));
        metrics_.set(prefix + "gap_max_us", flow.gap_max_us);
        std::int64_t dropped = metrics_.sum_prefix(prefix + "dropped.");
        std::int64_t in_flight = static_cast<std::int64_t>(flow.sent) -
                                 static_cast<std::int64_t>(flow.delivered) - dropped;
        metrics_.set(prefix + "in_flight", in_flight);
    }
    metrics_.set("sim.end_us", now_);
}

SimEngine::OfflineLookup SimEngine::offline_lookup(const AsId& src,
                                                   const AsId& dst) const {
    OfflineLookup result;
    if (!topo_.has_as(src)) {
        result.error = "no such AS";
        return result;
    }
    const AsRuntime& rt = ases_.at(src);
    bool src_core = topo_.as_node(src).is_core();
    result.reply.up = rt.up_store.query(src, now_, kLookupK);
    if (result.reply.up.empty() && !src_core) {
        result.error = "isolated";
        return result;
    }
    if (src == dst) return result;
    if (!topo_.has_as(dst)) {
        result.error = "no such AS";
        return result;
    }

    IsdId home = src.isd;
    std::vector<PathSegment> downs;
    if (core_ps_.count(home))
        downs = core_ps_.at(home).down_store.query(dst, now_, kLookupK);
    IsdId remote = dst.isd;
    if (downs.empty() && remote != home && core_ps_.count(remote))
        downs = core_ps_.at(remote).down_store.query(dst, now_, kLookupK);
    result.reply.down = downs;

    // Core segments joining the up terminals to the down starts.
    std::set<AsId> terminals;
    for (const PathSegment& u : result.reply.up) terminals.insert(u.core_as());
    if (src_core) terminals.insert(src);
    std::set<AsId> starts;
    for (const PathSegment& d : downs) starts.insert(d.core_as());
    if (topo_.as_node(dst).is_core()) starts.insert(dst);

    if (core_ps_.count(home)) {
        const SegmentStore& cs = core_ps_.at(home).core_store;
        for (const PathSegment* seg : cs.all()) {
            if (now_ >= seg->expiry_us()) continue;
            bool reverse_use = terminals.count(seg->last_as()) && starts.count(seg->first_as());
            bool forward_use = terminals.count(seg->first_as()) && starts.count(seg->last_as());
            if (reverse_use || forward_use) result.reply.core.push_back(*seg);
        }
    }
    return result;
}

std::vector<EndToEndPath> SimEngine::query_paths(const AsId& src, const AsId& dst) const {
    OfflineLookup lookup = offline_lookup(src, dst);
    if (!lookup.error.empty() && lookup.error != "isolated") return {};
    return combine(lookup.reply.up, lookup.reply.core, lookup.reply.down, src, dst,
                   topo_);
}

std::vector<std::string> SimEngine::audit() {
    std::vector<std::string> violations;
    auto check_segment = [&](const PathSegment& seg, const std::string& where,
                             const AsRuntime& view) {
        if (now_ >= seg.expiry_us()) return;  // unreturnable, skip
        PcbVerdict verdict = validate_segment(seg, view.trcs, view.certs, topo_, now_);
        if (!verdict.valid())
            violations.push_back(where + ": segment via " + seg.origin.to_string() +
                                 " invalid (" + verdict.reason + ")");
    };

    for (const auto& [id, rt] : ases_) {
        if (rt.adversary) continue;  // adversarial pools are not part of the claim
        for (SegmentKind kind : {SegmentKind::Up, SegmentKind::Core}) {
            for (const PoolEntry* entry : rt.pool.candidates(kind, now_, policy_)) {
                PcbVerdict verdict = validate_pcb(entry->pcb, rt.trcs, rt.certs, topo_, now_);
                if (!verdict.valid())
                    violations.push_back("pool@" + id.to_string() + ": beacon from " +
                                         entry->pcb.info.origin.to_string() +
                                         " invalid (" + verdict.reason + ")");
            }
        }
        for (const PathSegment* seg : rt.up_store.all())
            check_segment(*seg, "up@" + id.to_string(), rt);
    }
    for (const auto& [isd, cps] : core_ps_) {
        auto cores = topo_.core_ases(isd);
        if (cores.empty()) continue;
        const AsRuntime& view = ases_.at(cores.front());
        for (const PathSegment* seg : cps.down_store.all())
            check_segment(*seg, "down@isd" + std::to_string(isd), view);
        for (const PathSegment* seg : cps.core_store.all())
            check_segment(*seg, "core@isd" + std::to_string(isd), view);
    }
    metrics_.set("audit.violations", static_cast<std::int64_t>(violations.size()));
    return violations;
}

std::string SimEngine::interval_bucket(SimTime t) const {
    return std::to_string(t / policy_.interval_intra_us);
}

}  // namespace scion::sim
