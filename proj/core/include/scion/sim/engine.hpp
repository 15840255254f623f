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
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <variant>
#include <vector>

#include "scion/beacon.hpp"
#include "scion/combine.hpp"
#include "scion/forward.hpp"
#include "scion/packet.hpp"
#include "scion/path_store.hpp"
#include "scion/scmp.hpp"
#include "scion/sim/metrics.hpp"
#include "scion/sim/rng.hpp"
#include "scion/sim/scenario.hpp"

namespace scion::sim {

/// A packet on the simulated wire: the real header plus engine-side
/// bookkeeping (flow attribution, adversarial markers, an SCMP body riding
/// a reversed path).
struct SimPacket {
    PacketHeader header;
    AsId src_as;
    AsId dst_as;
    int flow_id = -1;
    std::uint64_t seq = 0;
    bool is_ack = false;
    bool forged = false;
    int honest_forwards = 0;  // FORWARD actions by non-adversarial ASes
    std::optional<ScmpMessage> scmp;
    SimTime sent_us = 0;
};

// ---- event payloads ----------------------------------------------------

struct EvTickIntra { AsId as; bool immediate = false; };
struct EvTickInter { AsId as; bool immediate = false; };
struct EvPcb { AsId from; AsId to; InterfaceId to_if; Pcb pcb; };
struct EvTrcRequest { AsId from; AsId to; IsdId isd; std::uint32_t want_version; };
struct EvTrcReply { AsId from; AsId to; std::vector<Trc> trcs; };
struct EvDrkeyRequest { AsId from; AsId to; };
struct EvDrkeyReply { AsId from; AsId to; DrKey key; Signature signature; };
struct EvCertRequest { AsId from; AsId to; std::vector<AsId> subjects; };
struct EvCertReply { AsId from; AsId to; std::vector<AsCert> certs; };
struct EvLookupRequest {
    std::uint64_t id = 0;
    AsId from;
    AsId core;  // serving core AS (per-ISD logical core path server)
    IsdId isd = 0;
    AsId target;
    std::vector<AsId> up_terminals;
};
struct EvCoreQuery {
    std::uint64_t id = 0;
    IsdId from_isd = 0;
    IsdId to_isd = 0;
    AsId from_core;
    AsId to_core;
    AsId target;
};
struct EvCoreReply {
    std::uint64_t id = 0;
    IsdId at_isd = 0;
    std::vector<PathSegment> downs;
    std::string error;
};
struct EvLookupReply {
    std::uint64_t id = 0;
    AsId to;
    LookupReply reply;
    std::string error;
};
struct EvRegister {
    AsId from;
    IsdId isd = 0;
    std::vector<PathSegment> segments;
    std::vector<AsCert> certs;  // the chain needed to validate the segments
};
struct EvRevoke { AsId to; ScmpMessage msg; };
struct EvPacket { AsId to; InterfaceId to_if; SimPacket packet; };
struct EvHostPacket { AsId at; SimPacket packet; };  // delivered to the host layer
struct EvFlowTick { int flow_id = 0; };
struct EvAckTimeout { int flow_id = 0; std::uint64_t seq = 0; };
struct EvFlowRetry { int flow_id = 0; };
struct EvDirective { std::size_t index = 0; };
struct EvLinkRestore { std::size_t link_index = 0; };
struct EvAttackPulse { std::size_t attack_index = 0; };

using EventPayload =
    std::variant<EvTickIntra, EvTickInter, EvPcb, EvTrcRequest, EvTrcReply,
                 EvDrkeyRequest, EvDrkeyReply, EvCertRequest, EvCertReply,
                 EvLookupRequest, EvCoreQuery, EvCoreReply, EvLookupReply,
                 EvRegister, EvRevoke, EvPacket, EvHostPacket, EvFlowTick,
                 EvAckTimeout, EvFlowRetry, EvDirective, EvLinkRestore,
                 EvAttackPulse>;

struct Event {
    SimTime time = 0;
    std::uint64_t seq = 0;  // FIFO tie-break within one timestamp
    EventPayload payload;
};

// ---- per-entity state ----------------------------------------------------

struct PendingPcb {
    Pcb pcb;
    AsId from;
    InterfaceId to_if = 0;
};

struct PendingScmp {
    ScmpMessage msg;
};

struct CachedLookup {
    LookupReply reply;
    SimTime expires_us = 0;
};

struct AsRuntime {
    AsId id;
    AsSecrets secrets;
    TrcStore trcs;
    CertStore certs;
    DrKeyCache drkeys;

    CandidateStore pool;
    std::map<std::string, std::uint64_t> last_sent_topk;  // per core link+origin
    std::map<IsdId, std::uint64_t> registered_shape_digest;

    SegmentStore up_store{16};
    std::map<AsId, CachedLookup> lookup_cache;

    std::vector<PendingPcb> pending_pcbs;  // waiting for a TRC or certificates
    std::set<std::pair<IsdId, std::uint32_t>> trc_fetches_outstanding;
    std::set<AsId> cert_fetches_outstanding;
    std::map<AsId, std::vector<PendingScmp>> quarantined;  // per issuer
    std::set<AsId> drkey_fetches_outstanding;
    std::set<std::tuple<AsId, InterfaceId, SimTime>> revocations_seen;
    std::set<InterfaceId> flooded_revocations;  // own interfaces, per failure
    bool pending_immediate_intra = false;
    bool pending_immediate_inter = false;
    bool adversary = false;
};

/// Per-ISD logical core path server (the replicated core servers of an ISD
/// modeled as one store; requests are addressed to the lowest core AS).
struct CorePs {
    SegmentStore down_store{16};
    SegmentStore core_store{16};  // keyed by originating core AS
    std::map<AsId, CachedLookup> remote_cache;  // cross-ISD down segments
};

struct FlowPath {
    EndToEndPath path;
    bool alive = true;
};

enum class FlowStatus { WaitingPath, Active, Done };

struct FlowState {
    FlowSpec spec;
    FlowStatus status = FlowStatus::WaitingPath;
    std::vector<FlowPath> paths;
    std::size_t active = 0;
    std::uint64_t next_seq = 0;
    std::map<std::uint64_t, SimTime> unacked;
    int consecutive_timeouts = 0;
    std::uint64_t delivered = 0;
    SimTime last_delivery_us = -1;
    SimTime gap_max_us = 0;
    std::uint64_t switchovers = 0;
    std::uint64_t sent = 0;
    std::optional<std::uint64_t> pending_lookup;
};

// ---- engine ---------------------------------------------------------------

class SimEngine {
  public:
    /// The scenario must resolve to a topology before construction.
    explicit SimEngine(Scenario scenario);

    /// Executes the event script to the scenario duration. Deterministic:
    /// equal (scenario, seed) inputs produce byte-equal metric exports.
    Metrics& run();

    Metrics& metrics() { return metrics_; }
    const Topology& topology() const { return topo_; }
    SimTime now() const { return now_; }

    const AsRuntime& as_runtime(const AsId& as) const { return ases_.at(as); }
    const CorePs& core_ps(IsdId isd) const { return core_ps_.at(isd); }
    const FlowState& flow(int id) const { return flows_.at(static_cast<std::size_t>(id)); }
    const std::map<AsId, AsRuntime>& all_ases() const { return ases_; }

    /// Synchronous lookup against current stores (no messages, no cache):
    /// the path-resolution outcome an idle control plane would return.
    struct OfflineLookup {
        LookupReply reply;
        std::string error;
    };
    OfflineLookup offline_lookup(const AsId& src, const AsId& dst) const;

    /// Ranked end-to-end paths from the current control-plane state.
    std::vector<EndToEndPath> query_paths(const AsId& src, const AsId& dst) const;

    /// Re-validates every pooled beacon and stored segment everywhere.
    /// Returns human-readable violations (empty on a clean world) and
    /// records the count under metric "audit.violations".
    std::vector<std::string> audit();

    /// Optional hook receiving every encoded packet put on a wire.
    std::function<void(const Bytes&)> packet_tap;

  private:
    // engine.cpp
    void bootstrap();
    void schedule(SimTime at, EventPayload payload);
    void dispatch(const Event& event);
    void apply_directive(std::size_t index);
    void apply_trc_update(const TrcUpdateDirective& directive);
    void fail_link(std::size_t link_index);
    void restore_link(std::size_t link_index);
    std::optional<SimTime> control_latency(const AsId& from, const AsId& to) const;
    void finalize_metrics();

    // engine_control.cpp
    void on_tick_intra(const EvTickIntra& ev);
    void on_tick_inter(const EvTickInter& ev);
    void on_pcb(const EvPcb& ev, bool replay = false);
    void on_trc_request(const EvTrcRequest& ev);
    void on_trc_reply(const EvTrcReply& ev);
    void on_drkey_request(const EvDrkeyRequest& ev);
    void on_drkey_reply(const EvDrkeyReply& ev);
    void on_cert_request(const EvCertRequest& ev);
    void on_cert_reply(const EvCertReply& ev);
    void on_lookup_request(const EvLookupRequest& ev);
    void on_core_query(const EvCoreQuery& ev);
    void on_core_reply(const EvCoreReply& ev);
    void on_lookup_reply(const EvLookupReply& ev);
    void on_register(const EvRegister& ev);
    void on_revoke(const EvRevoke& ev);
    void start_lookup(std::uint64_t id, const AsId& src, const AsId& dst);
    void complete_lookup(std::uint64_t id, LookupReply reply, std::string error);
    void process_revocation(AsRuntime& as, const ScmpMessage& msg);
    void flood_revocation(const AsId& issuer, InterfaceId ifid);
    void send_pcbs_on_link(AsRuntime& as, const Neighbor& link, SegmentKind kind,
                           bool only_if_changed);
    void refresh_segments_and_register(AsRuntime& as);
    std::vector<PeerLinkSpec> live_peer_specs(const AsId& as) const;
    InterfaceId arrival_interface(const Pcb& pcb, const AsId& receiver) const;
    std::uint32_t attested_trc_version(const AsRuntime& as) const;

    // engine_data.cpp
    void on_packet(const EvPacket& ev);
    void on_host_packet(const EvHostPacket& ev);
    void on_flow_tick(const EvFlowTick& ev);
    void on_ack_timeout(const EvAckTimeout& ev);
    void on_flow_retry(const EvFlowRetry& ev);
    void on_attack_pulse(const EvAttackPulse& ev);
    void flow_send_packet(FlowState& flow);
    void flow_begin_lookup(FlowState& flow);
    void flow_adopt_paths(FlowState& flow, const LookupReply& reply);
    void flow_failover(FlowState& flow, const std::string& why);
    void deliver_scmp_to_host(const AsId& at, const SimPacket& packet);
    void emit_packet_from(const AsId& as, SimPacket packet);
    void run_attack(const AttackDirective& attack);

    bool link_up_index(std::size_t index) const { return link_up_[index]; }
    bool link_up_at(const AsId& as, InterfaceId ifid) const;
    std::string interval_bucket(SimTime t) const;

    Scenario scenario_;
    Topology topo_;
    BeaconPolicy policy_;
    ScenarioOptions options_;

    std::map<AsId, AsRuntime> ases_;
    std::map<IsdId, CorePs> core_ps_;
    std::map<IsdId, std::vector<KeyPair>> roots_;
    std::map<IsdId, Trc> latest_trc_;  // authoritative chain head, for updates
    std::vector<bool> link_up_;
    std::vector<FlowState> flows_;
    std::vector<AttackDirective> attacks_;

    struct PendingLookup {
        AsId requester;       // local path server AS
        AsId target;
        int flow_id = -1;
        std::vector<AsId> up_terminals;
        LookupReply partial;
    };
    std::map<std::uint64_t, PendingLookup> pending_lookups_;
    std::uint64_t next_lookup_id_ = 1;

    std::map<std::pair<IsdId, std::uint32_t>, SimTime> trc_injected_at_;

    std::priority_queue<Event, std::vector<Event>,
                        std::function<bool(const Event&, const Event&)>>
        queue_{[](const Event& a, const Event& b) {
            return std::make_pair(a.time, a.seq) > std::make_pair(b.time, b.seq);
        }};
    std::uint64_t next_event_seq_ = 0;
    SimTime now_ = 0;
    bool ran_ = false;

    Metrics metrics_;
    RngStreams rng_;
};

}  // namespace scion::sim
