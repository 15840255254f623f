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

#include "scion/topology.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <sstream>

namespace scion {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::vector<std::string> split_csv(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t comma = s.find(',', start);
        if (comma == std::string_view::npos) {
            if (start < s.size()) out.emplace_back(s.substr(start));
            break;
        }
        if (comma > start) out.emplace_back(s.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

bool parse_u16(std::string_view s, std::uint16_t& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::string Link::id() const {
    return a.to_string() + ":" + std::to_string(a_if) + "~" + b.to_string() +
           ":" + std::to_string(b_if);
}

Topology Topology::parse(std::string_view text) {
    Topology topo;

    struct RawLine {
        int number;
        std::vector<std::string_view> tokens;
    };
    std::vector<RawLine> lines;
    {
        int number = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t eol = text.find('\n', pos);
            std::string_view line = text.substr(
                pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
            ++number;
            if (auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
            auto tokens = split_ws(line);
            if (!tokens.empty()) lines.push_back({number, std::move(tokens)});
            if (eol == std::string_view::npos) break;
            pos = eol + 1;
        }
    }

    // First pass: the ISD universe, so `as` lines may reference ISDs declared
    // later in the file.
    for (const auto& ln : lines) {
        if (ln.tokens[0] != "isd") continue;
        if (ln.tokens.size() != 2) throw ParseError("isd expects one argument", ln.number);
        std::uint16_t id = 0;
        if (!parse_u16(ln.tokens[1], id) || id == 0)
            throw ParseError("invalid isd id", ln.number);
        if (!topo.isds_.insert(id).second)
            throw ParseError("duplicate isd " + std::to_string(id), ln.number);
    }

    auto parse_isd_list = [&](std::string_view csv, int number) {
        std::set<IsdId> out;
        for (const auto& item : split_csv(csv)) {
            std::uint16_t id = 0;
            if (!parse_u16(item, id) || id == 0)
                throw ParseError("invalid isd list entry '" + item + "'", number);
            if (!topo.isds_.count(id))
                throw ParseError("undeclared isd " + std::to_string(id), number);
            out.insert(id);
        }
        return out;
    };

    for (const auto& ln : lines) {
        const auto& t = ln.tokens;
        if (t[0] == "isd") continue;

        if (t[0] == "as") {
            if (t.size() < 2) throw ParseError("as expects an id", ln.number);
            auto id = AsId::parse(t[1]);
            if (!id) throw ParseError("invalid as id '" + std::string(t[1]) + "'", ln.number);
            if (!topo.isds_.count(id->isd))
                throw ParseError("undeclared isd " + std::to_string(id->isd), ln.number);
            AsNode node;
            node.id = *id;
            node.member_of.insert(id->isd);
            for (std::size_t i = 2; i < t.size(); ++i) {
                std::string_view opt = t[i];
                if (opt.starts_with("core=")) {
                    node.core_in = parse_isd_list(opt.substr(5), ln.number);
                } else if (opt.starts_with("member=")) {
                    auto extra = parse_isd_list(opt.substr(7), ln.number);
                    node.member_of.insert(extra.begin(), extra.end());
                } else if (opt.starts_with("labels=")) {
                    node.labels = split_csv(opt.substr(7));
                    std::sort(node.labels.begin(), node.labels.end());
                } else {
                    throw ParseError("unknown as option '" + std::string(opt) + "'", ln.number);
                }
            }
            // Core membership implies membership.
            node.member_of.insert(node.core_in.begin(), node.core_in.end());
            if (!topo.ases_.emplace(*id, std::move(node)).second)
                throw ParseError("duplicate as " + id->to_string(), ln.number);
            continue;
        }

        if (t[0] == "link") {
            if (t.size() < 6) throw ParseError("link expects 5 arguments", ln.number);
            Link link;
            auto a = AsId::parse(t[1]);
            auto b = AsId::parse(t[3]);
            std::uint16_t a_if = 0, b_if = 0;
            if (!a || !b) throw ParseError("invalid as id in link", ln.number);
            if (!parse_u16(t[2], a_if) || !parse_u16(t[4], b_if))
                throw ParseError("invalid interface id in link", ln.number);
            auto kind = link_type_from_string(t[5]);
            if (!kind) throw ParseError("unknown link type '" + std::string(t[5]) + "'", ln.number);
            link.a = *a;
            link.a_if = a_if;
            link.b = *b;
            link.b_if = b_if;
            link.kind = *kind;
            for (std::size_t i = 6; i < t.size(); ++i) {
                std::string_view opt = t[i];
                if (opt.starts_with("labels=")) {
                    link.labels = split_csv(opt.substr(7));
                    std::sort(link.labels.begin(), link.labels.end());
                } else {
                    throw ParseError("unknown link option '" + std::string(opt) + "'", ln.number);
                }
            }

            if (link.a == link.b)
                throw ValidationError("link endpoints must differ: " + link.id());
            for (const AsId& end : {link.a, link.b}) {
                if (!topo.ases_.count(end))
                    throw ParseError("link references undeclared as " + end.to_string() +
                                         " (ASes must precede their links)",
                                     ln.number);
            }
            for (auto [end, ifid] : {std::pair{link.a, link.a_if}, {link.b, link.b_if}}) {
                if (ifid == kNoInterface || ifid > kMaxInterface)
                    throw ValidationError("interface id out of range on " + end.to_string());
                if (topo.ases_.at(end).interfaces.count(ifid))
                    throw ValidationError("duplicate interface " + std::to_string(ifid) +
                                          " on " + end.to_string());
            }

            auto index = static_cast<std::uint32_t>(topo.links_.size());
            topo.ases_.at(link.a).interfaces[link.a_if] =
                LinkEnd{link.b, link.a_if, link.b_if, link.kind, index};
            topo.ases_.at(link.b).interfaces[link.b_if] =
                LinkEnd{link.a, link.b_if, link.a_if, link.kind, index};
            topo.links_.push_back(std::move(link));
            continue;
        }

        throw ParseError("unknown declaration '" + std::string(t[0]) + "'", ln.number);
    }

    topo.validate();
    return topo;
}

Topology Topology::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open topology file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void Topology::validate() {
    for (const auto& [id, node] : ases_) {
        for (IsdId isd : node.core_in) {
            if (!node.member_of.count(isd))
                throw ValidationError("core set exceeds membership on " + id.to_string());
        }
        // A linked core AS must participate in the backbone; an entirely
        // isolated core AS is the degenerate single-AS world and stays valid.
        if (node.is_core() && !node.interfaces.empty()) {
            bool has_backbone = false;
            for (const auto& [ifid, end] : node.interfaces) {
                if (end.kind == LinkType::Core ||
                    (end.kind == LinkType::ProviderToCustomer)) {
                    has_backbone = true;
                    break;
                }
            }
            if (!has_backbone)
                throw ValidationError("core as " + id.to_string() +
                                      " has no CORE or P2C link");
        }
        if (node.is_core() && node.core_in != node.member_of) {
            for (IsdId isd : node.member_of) {
                if (!node.core_in.count(isd))
                    warnings_.push_back("as " + id.to_string() + " is core in one ISD but a non-core member of isd " +
                                        std::to_string(isd));
            }
        }
    }

    for (const Link& link : links_) {
        if (link.kind == LinkType::Core) {
            if (!ases_.at(link.a).is_core() || !ases_.at(link.b).is_core())
                throw ValidationError("CORE link between non-core ASes: " + link.id());
        }
        if (link.kind == LinkType::ProviderToCustomer) {
            const AsNode& provider = ases_.at(link.a);
            const AsNode& customer = ases_.at(link.b);
            // A core AS never buys transit inside an ISD it is core of.
            for (IsdId isd : customer.core_in) {
                if (provider.is_member_of(isd))
                    throw ValidationError("customer DAG violated: core as " +
                                          customer.id.to_string() +
                                          " has a provider within isd " +
                                          std::to_string(isd));
            }
        }
    }

    // Global acyclicity of the provider->customer relation (Kahn).
    {
        std::map<AsId, int> indegree;
        std::map<AsId, std::vector<AsId>> out_edges;
        for (const auto& [id, node] : ases_) indegree[id] = 0;
        for (const Link& link : links_) {
            if (link.kind != LinkType::ProviderToCustomer) continue;
            out_edges[link.a].push_back(link.b);
            indegree[link.b] += 1;
        }
        std::deque<AsId> frontier;
        for (const auto& [id, deg] : indegree)
            if (deg == 0) frontier.push_back(id);
        std::size_t visited = 0;
        while (!frontier.empty()) {
            AsId id = frontier.front();
            frontier.pop_front();
            ++visited;
            for (const AsId& next : out_edges[id]) {
                if (--indegree[next] == 0) frontier.push_back(next);
            }
        }
        if (visited != ases_.size())
            throw ValidationError("customer DAG violated: provider cycle detected");
    }

    // Every non-core member must be reachable from its ISD core over P2C
    // links whose endpoints stay within the ISD.
    for (IsdId isd : isds_) {
        std::set<AsId> reached;
        std::deque<AsId> frontier;
        for (const auto& [id, node] : ases_) {
            if (node.is_core_in(isd)) {
                reached.insert(id);
                frontier.push_back(id);
            }
        }
        while (!frontier.empty()) {
            AsId id = frontier.front();
            frontier.pop_front();
            for (const auto& [ifid, end] : ases_.at(id).interfaces) {
                if (end.kind != LinkType::ProviderToCustomer) continue;
                const Link& link = links_[end.link_index];
                if (link.a != id) continue;  // only provider -> customer direction
                if (!ases_.at(link.b).is_member_of(isd)) continue;
                if (reached.insert(link.b).second) frontier.push_back(link.b);
            }
        }
        for (const auto& [id, node] : ases_) {
            if (node.is_member_of(isd) && !node.is_core_in(isd) && !reached.count(id))
                throw ValidationError("as " + id.to_string() +
                                      " unreachable from the core of isd " +
                                      std::to_string(isd));
        }
        if (reached.empty() && !members_of(isd).empty())
            throw ValidationError("isd " + std::to_string(isd) + " has members but no core");
    }
}

std::string Topology::serialize() const {
    std::ostringstream out;
    for (IsdId isd : isds_) out << "isd " << isd << "\n";
    auto csv = [](const auto& items) {
        std::string s;
        for (const auto& item : items) {
            if (!s.empty()) s += ",";
            if constexpr (std::is_same_v<std::decay_t<decltype(item)>, std::string>)
                s += item;
            else
                s += std::to_string(item);
        }
        return s;
    };
    for (const auto& [id, node] : ases_) {
        out << "as " << id.to_string();
        if (!node.core_in.empty()) out << " core=" << csv(node.core_in);
        std::set<IsdId> extra = node.member_of;
        extra.erase(id.isd);
        for (IsdId isd : node.core_in) extra.erase(isd);
        if (!extra.empty()) out << " member=" << csv(extra);
        if (!node.labels.empty()) out << " labels=" << csv(node.labels);
        out << "\n";
    }
    std::vector<Link> sorted = links_;
    std::sort(sorted.begin(), sorted.end(), [](const Link& x, const Link& y) {
        return std::tie(x.a, x.a_if) < std::tie(y.a, y.a_if);
    });
    for (const Link& link : sorted) {
        out << "link " << link.a.to_string() << " " << link.a_if << " "
            << link.b.to_string() << " " << link.b_if << " " << to_string(link.kind);
        if (!link.labels.empty()) out << " labels=" << csv(link.labels);
        out << "\n";
    }
    return out.str();
}

const AsNode& Topology::as_node(const AsId& as) const {
    auto it = ases_.find(as);
    if (it == ases_.end()) throw ValidationError("unknown as " + as.to_string());
    return it->second;
}

std::vector<Neighbor> Topology::neighbors(const AsId& as, NeighborKind kind) const {
    const AsNode& node = as_node(as);
    std::vector<Neighbor> out;
    for (const auto& [ifid, end] : node.interfaces) {
        const Link& link = links_[end.link_index];
        bool match = false;
        switch (kind) {
            case NeighborKind::Core: match = link.kind == LinkType::Core; break;
            case NeighborKind::Peer: match = link.kind == LinkType::Peering; break;
            case NeighborKind::Customer:
                match = link.kind == LinkType::ProviderToCustomer && link.a == as;
                break;
            case NeighborKind::Provider:
                match = link.kind == LinkType::ProviderToCustomer && link.b == as;
                break;
        }
        if (match) out.push_back(Neighbor{end.peer, end.local_if, end.remote_if, end.link_index});
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Neighbor> Topology::neighbors(const AsId& as, LinkType kind) const {
    switch (kind) {
        case LinkType::Core: return neighbors(as, NeighborKind::Core);
        case LinkType::Peering: return neighbors(as, NeighborKind::Peer);
        case LinkType::ProviderToCustomer: return neighbors(as, NeighborKind::Customer);
    }
    return {};
}

const Link* Topology::find_link(const AsId& as, InterfaceId ifid) const {
    auto it = ases_.find(as);
    if (it == ases_.end()) return nullptr;
    auto li = it->second.interfaces.find(ifid);
    if (li == it->second.interfaces.end()) return nullptr;
    return &links_[li->second.link_index];
}

const Link* Topology::find_link_by_id(std::string_view link_id) const {
    for (const Link& link : links_)
        if (link.id() == link_id) return &link;
    return nullptr;
}

std::vector<AsId> Topology::core_ases(IsdId isd) const {
    std::vector<AsId> out;
    for (const auto& [id, node] : ases_)
        if (node.is_core_in(isd)) out.push_back(id);
    return out;
}

std::vector<AsId> Topology::members_of(IsdId isd) const {
    std::vector<AsId> out;
    for (const auto& [id, node] : ases_)
        if (node.is_member_of(isd)) out.push_back(id);
    return out;
}

std::vector<std::pair<IsdId, IsdId>> Topology::isd_adjacency() const {
    std::set<std::pair<IsdId, IsdId>> pairs;
    for (const Link& link : links_) {
        for (IsdId ia : ases_.at(link.a).member_of) {
            for (IsdId ib : ases_.at(link.b).member_of) {
                if (ia == ib) continue;
                pairs.emplace(std::min(ia, ib), std::max(ia, ib));
            }
        }
    }
    return {pairs.begin(), pairs.end()};
}

}  // namespace scion
