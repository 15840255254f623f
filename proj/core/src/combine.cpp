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

#include <algorithm>
#include <functional>
#include <limits>

namespace scion {

std::string to_string(PathCase c) {
    switch (c) {
        case PathCase::Immediate: return "IMMEDIATE";
        case PathCase::AsShortcut: return "AS_SHORTCUT";
        case PathCase::PeeringShortcut: return "PEERING_SHORTCUT";
        case PathCase::CoreCombined: return "CORE_COMBINED";
    }
    return "?";
}

std::vector<AsId> EndToEndPath::as_sequence() const {
    std::vector<AsId> out;
    for (const PathSlice& slice : slices) {
        for (const PathHop& hop : slice.hops) {
            if (out.empty() || out.back() != hop.as) out.push_back(hop.as);
        }
    }
    if (out.empty()) out.push_back(src);
    return out;
}

std::size_t EndToEndPath::hop_count() const { return as_sequence().size() - 1; }

std::size_t EndToEndPath::of_count() const {
    std::size_t n = 0;
    for (const PathSlice& slice : slices) n += slice.of_count();
    return n;
}

std::size_t EndToEndPath::path_region_bytes() const {
    return 8 * (slices.size() + of_count());
}

std::int64_t EndToEndPath::expiry_us() const {
    std::int64_t expiry = std::numeric_limits<std::int64_t>::max();
    for (const PathSlice& slice : slices) {
        for (const PathHop& hop : slice.hops)
            expiry = std::min(expiry, hop.of.expiry_us(slice.timestamp_s));
        if (slice.continuation)
            expiry = std::min(expiry, slice.continuation->expiry_us(slice.timestamp_s));
    }
    return expiry;
}

namespace {

PathHop to_path_hop(const SegmentHop& hop) {
    return PathHop{hop.as_id, hop.ingress_if, hop.egress_if, hop.of};
}

PathSlice slice_base(const PathSegment& seg, bool reversed) {
    PathSlice slice;
    slice.kind = seg.kind;
    slice.reversed = reversed;
    slice.timestamp_s = seg.timestamp_s;
    slice.isd = seg.isd;
    return slice;
}

// Up slices: segment hops are already in traversal order (leaf to core).
PathSlice up_slice(const PathSegment& u, std::size_t upto_index) {
    PathSlice slice = slice_base(u, /*reversed=*/true);
    for (std::size_t i = 0; i <= upto_index; ++i) slice.hops.push_back(to_path_hop(u.hops[i]));
    if (upto_index + 1 < u.hops.size()) slice.continuation = u.hops[upto_index + 1].of;
    return slice;
}

PathSlice up_slice_peering(const PathSegment& u, std::size_t index, const PeerEntry& peer) {
    PathSlice slice = slice_base(u, /*reversed=*/true);
    slice.peering = true;
    for (std::size_t i = 0; i < index; ++i) slice.hops.push_back(to_path_hop(u.hops[i]));
    slice.hops.push_back(
        PathHop{u.hops[index].as_id, u.hops[index].ingress_if, peer.local_if, peer.of});
    slice.continuation = u.hops[index].of;  // peer OFs chain to their own hop
    return slice;
}

PathSlice down_slice(const PathSegment& d, std::size_t from_index) {
    PathSlice slice = slice_base(d, /*reversed=*/false);
    for (std::size_t i = from_index; i < d.hops.size(); ++i)
        slice.hops.push_back(to_path_hop(d.hops[i]));
    if (from_index > 0) slice.continuation = d.hops[from_index - 1].of;
    return slice;
}

PathSlice down_slice_peering(const PathSegment& d, std::size_t index, const PeerEntry& peer) {
    PathSlice slice = slice_base(d, /*reversed=*/false);
    slice.peering = true;
    slice.hops.push_back(
        PathHop{d.hops[index].as_id, peer.local_if, d.hops[index].egress_if, peer.of});
    for (std::size_t i = index + 1; i < d.hops.size(); ++i)
        slice.hops.push_back(to_path_hop(d.hops[i]));
    slice.continuation = d.hops[index].of;
    return slice;
}

PathSlice core_slice(const PathSegment& c, bool toward_origin) {
    PathSlice slice = slice_base(c, /*reversed=*/toward_origin);
    if (toward_origin) {
        for (auto it = c.hops.rbegin(); it != c.hops.rend(); ++it)
            slice.hops.push_back(PathHop{it->as_id, it->egress_if, it->ingress_if, it->of});
    } else {
        for (const SegmentHop& hop : c.hops) slice.hops.push_back(to_path_hop(hop));
    }
    return slice;
}

int case_rank(PathCase c) {
    switch (c) {
        case PathCase::Immediate: return 0;
        case PathCase::AsShortcut:
        case PathCase::PeeringShortcut: return 1;
        case PathCase::CoreCombined: return 2;
    }
    return 3;
}

std::uint64_t path_digest(const EndToEndPath& path) {
    ByteWriter w;
    for (const PathSlice& slice : path.slices) {
        w.u8(static_cast<std::uint8_t>(slice.kind));
        w.u8(slice.reversed ? 1 : 0);
        w.u32(slice.timestamp_s);
        for (const PathHop& hop : slice.hops) {
            w.as_id(hop.as);
            w.raw(hop.of.encode());
        }
        if (slice.continuation) w.raw(slice.continuation->encode());
    }
    return fnv1a64(w.bytes());
}

}  // namespace

std::optional<std::string> check_path_validity(const EndToEndPath& path,
                                               const Topology& topo) {
    if (path.slices.empty()) {
        if (path.src == path.dst) return std::nullopt;
        return "empty path between distinct ASes";
    }
    for (const PathSlice& slice : path.slices)
        if (slice.hops.empty()) return "empty slice";

    if (path.slices.front().hops.front().as != path.src) return "does not start at source";
    if (path.slices.back().hops.back().as != path.dst) return "does not end at destination";

    std::set<AsId> seen;
    for (std::size_t s = 0; s < path.slices.size(); ++s) {
        const PathSlice& slice = path.slices[s];
        for (std::size_t i = 0; i < slice.hops.size(); ++i) {
            const PathHop& hop = slice.hops[i];
            if (!topo.has_as(hop.as)) return "unknown as " + hop.as.to_string();
            bool crossover_dup = s > 0 && i == 0 && !path.slices[s - 1].peering &&
                                 path.slices[s - 1].hops.back().as == hop.as;
            if (!crossover_dup && !seen.insert(hop.as).second)
                return "loop at " + hop.as.to_string();

            if (i + 1 < slice.hops.size()) {
                const PathHop& next = slice.hops[i + 1];
                const Link* link = topo.find_link(hop.as, hop.egress_if);
                if (!link || link->other(hop.as) != next.as ||
                    link->if_of_other(hop.as) != next.ingress_if)
                    return "interfaces do not join " + hop.as.to_string() + " and " +
                           next.as.to_string();
            }
        }
        if (s + 1 < path.slices.size()) {
            const PathHop& last = slice.hops.back();
            const PathHop& first = path.slices[s + 1].hops.front();
            if (slice.peering) {
                const Link* link = topo.find_link(last.as, last.egress_if);
                if (!link || link->kind != LinkType::Peering ||
                    link->other(last.as) != first.as ||
                    link->if_of_other(last.as) != first.ingress_if)
                    return "peering splice does not join " + last.as.to_string() +
                           " and " + first.as.to_string();
            } else {
                if (last.as != first.as)
                    return "crossover between distinct ASes " + last.as.to_string() +
                           " and " + first.as.to_string();
            }
        }
    }
    return std::nullopt;
}

std::vector<EndToEndPath> combine(const std::vector<PathSegment>& ups,
                                  const std::vector<PathSegment>& cores,
                                  const std::vector<PathSegment>& downs,
                                  const AsId& src, const AsId& dst,
                                  const Topology& topo) {
    std::vector<EndToEndPath> out;
    std::set<std::uint64_t> dedup;

    auto push = [&](PathCase tag, std::vector<PathSlice> slices) {
        EndToEndPath path;
        path.case_tag = tag;
        path.src = src;
        path.dst = dst;
        path.slices = std::move(slices);
        for (const PathSlice& slice : path.slices) path.isds_traversed.insert(slice.isd);
        if (check_path_validity(path, topo)) return;  // adjacency or loop failure
        if (!dedup.insert(path_digest(path)).second) return;
        out.push_back(std::move(path));
    };

    if (src == dst) {
        EndToEndPath path;
        path.case_tag = PathCase::Immediate;
        path.src = src;
        path.dst = dst;
        out.push_back(std::move(path));
        return out;
    }

    std::vector<const PathSegment*> my_ups, my_downs;
    for (const PathSegment& u : ups)
        if (u.kind == SegmentKind::Up && u.leaf_as() == src) my_ups.push_back(&u);
    for (const PathSegment& d : downs)
        if (d.kind == SegmentKind::Down && d.leaf_as() == dst) my_downs.push_back(&d);

    bool src_core = topo.has_as(src) && topo.as_node(src).is_core();
    bool dst_core = topo.has_as(dst) && topo.as_node(dst).is_core();

    auto core_slices_between = [&](const AsId& from, const AsId& to) {
        std::vector<PathSlice> slices;
        for (const PathSegment& c : cores) {
            if (c.kind != SegmentKind::Core || c.hops.size() < 2) continue;
            if (c.last_as() == from && c.first_as() == to)
                slices.push_back(core_slice(c, /*toward_origin=*/true));
            else if (c.first_as() == from && c.last_as() == to)
                slices.push_back(core_slice(c, /*toward_origin=*/false));
        }
        return slices;
    };

    // Pairwise up/down combinations.
    for (const PathSegment* u : my_ups) {
        for (const PathSegment* d : my_downs) {
            // Intersections below the core: AS shortcuts (including the
            // destination or source lying on the other segment).
            for (std::size_t iu = 0; iu < u->hops.size(); ++iu) {
                const AsId& x = u->hops[iu].as_id;
                if (topo.as_node(x).is_core()) continue;
                for (std::size_t id = 0; id < d->hops.size(); ++id) {
                    if (d->hops[id].as_id != x) continue;
                    if (x == dst) {
                        push(PathCase::AsShortcut, {up_slice(*u, iu)});
                    } else if (x == src) {
                        push(PathCase::AsShortcut, {down_slice(*d, id)});
                    } else {
                        push(PathCase::AsShortcut,
                             {up_slice(*u, iu), down_slice(*d, id)});
                    }
                }
            }

            // Peering shortcut: the same link announced on both segments,
            // from opposite endpoints.
            for (std::size_t iu = 0; iu < u->hops.size(); ++iu) {
                for (const PeerEntry& pu : u->hops[iu].peers) {
                    for (std::size_t id = 0; id < d->hops.size(); ++id) {
                        if (d->hops[id].as_id != pu.peer) continue;
                        if (d->hops[id].as_id == u->hops[iu].as_id) continue;
                        for (const PeerEntry& pd : d->hops[id].peers) {
                            if (pd.peer != u->hops[iu].as_id) continue;
                            if (pd.local_if != pu.peer_if || pd.peer_if != pu.local_if)
                                continue;
                            push(PathCase::PeeringShortcut,
                                 {up_slice_peering(*u, iu, pu),
                                  down_slice_peering(*d, id, pd)});
                        }
                    }
                }
            }

            // Immediate combination at the shared core.
            if (u->core_as() == d->core_as()) {
                push(PathCase::Immediate,
                     {up_slice(*u, u->hops.size() - 1), down_slice(*d, 0)});
            } else {
                // Core-segment combination, either orientation.
                for (PathSlice& cs : core_slices_between(u->core_as(), d->core_as())) {
                    push(PathCase::CoreCombined,
                         {up_slice(*u, u->hops.size() - 1), std::move(cs),
                          down_slice(*d, 0)});
                }
            }
        }
    }

    // The destination lies on an up-segment: the truncated up-segment alone
    // is a path, down segments or not.
    for (const PathSegment* u : my_ups) {
        for (std::size_t iu = 0; iu < u->hops.size(); ++iu) {
            if (u->hops[iu].as_id != dst) continue;
            if (topo.as_node(dst).is_core()) continue;  // handled below
            push(PathCase::AsShortcut, {up_slice(*u, iu)});
        }
    }

    // The destination is a core AS: the up-segment (plus a core segment when
    // needed) is the whole path.
    if (dst_core) {
        for (const PathSegment* u : my_ups) {
            if (u->core_as() == dst) {
                push(PathCase::Immediate, {up_slice(*u, u->hops.size() - 1)});
            } else {
                for (PathSlice& cs : core_slices_between(u->core_as(), dst)) {
                    push(PathCase::CoreCombined,
                         {up_slice(*u, u->hops.size() - 1), std::move(cs)});
                }
            }
        }
    }

    // The source is a core AS.
    if (src_core) {
        for (const PathSegment* d : my_downs) {
            if (d->core_as() == src) {
                push(PathCase::Immediate, {down_slice(*d, 0)});
            } else {
                for (PathSlice& cs : core_slices_between(src, d->core_as())) {
                    push(PathCase::CoreCombined, {std::move(cs), down_slice(*d, 0)});
                }
            }
        }
        if (dst_core) {
            for (PathSlice& cs : core_slices_between(src, dst)) {
                push(PathCase::CoreCombined, {std::move(cs)});
            }
        }
    }

    std::sort(out.begin(), out.end(), [](const EndToEndPath& a, const EndToEndPath& b) {
        auto key = [](const EndToEndPath& p) {
            return std::make_tuple(p.hop_count(), -p.expiry_us(), case_rank(p.case_tag),
                                   p.as_sequence(), path_digest(p));
        };
        return key(a) < key(b);
    });
    return out;
}

std::set<std::vector<AsId>> enumerate_oracle(const Topology& topo, const AsId& src,
                                             const AsId& dst) {
    std::set<std::vector<AsId>> out;
    if (!topo.has_as(src) || !topo.has_as(dst)) return out;
    if (src == dst) {
        out.insert({src});
        return out;
    }

    // Phase 0: ascending provider links. Phase 1: core links. Phase 2:
    // descending customer links. One peering edge jumps straight to phase 2.
    std::vector<AsId> path{src};
    std::set<AsId> visited{src};

    std::function<void(const AsId&, int)> dfs = [&](const AsId& cur, int phase) {
        if (cur == dst) out.insert(path);
        const AsNode& node = topo.as_node(cur);
        for (const auto& [ifid, end] : node.interfaces) {
            const Link& link = topo.links()[end.link_index];
            AsId next = link.other(cur);
            if (visited.count(next)) continue;

            int next_phase = -1;
            if (link.kind == LinkType::ProviderToCustomer) {
                if (link.b == cur && phase == 0) next_phase = 0;          // ascend
                else if (link.a == cur) next_phase = 2;                   // descend
            } else if (link.kind == LinkType::Core) {
                if (phase <= 1) next_phase = 1;
            } else if (link.kind == LinkType::Peering) {
                if (phase == 0) next_phase = 2;
            }
            if (next_phase < 0) continue;

            visited.insert(next);
            path.push_back(next);
            dfs(next, next_phase);
            path.pop_back();
            visited.erase(next);
        }
    };
    dfs(src, 0);
    return out;
}

}  // namespace scion
