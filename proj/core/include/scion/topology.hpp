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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "scion/ids.hpp"

namespace scion {

/// An inter-AS link. For ProviderToCustomer links `a` is the provider.
/// Interface identifiers are local to their endpoint; only the owning AS
/// interprets them.
struct Link {
    AsId a;
    InterfaceId a_if = 0;
    AsId b;
    InterfaceId b_if = 0;
    LinkType kind = LinkType::Core;
    std::vector<std::string> labels;

    /// Stable textual identifier, e.g. "1-1:5~1-10:1".
    std::string id() const;

    AsId other(const AsId& self) const { return self == a ? b : a; }
    InterfaceId if_of(const AsId& self) const { return self == a ? a_if : b_if; }
    InterfaceId if_of_other(const AsId& self) const { return self == a ? b_if : a_if; }
};

/// One endpoint's view of a link, kept in the per-AS interface map.
struct LinkEnd {
    AsId peer;
    InterfaceId local_if = 0;
    InterfaceId remote_if = 0;
    LinkType kind = LinkType::Core;
    std::uint32_t link_index = 0;  // index into Topology::links()
};

struct AsNode {
    AsId id;
    std::set<IsdId> core_in;    // ISDs where this AS is a core AS
    std::set<IsdId> member_of;  // always contains id.isd
    std::vector<std::string> labels;
    std::map<InterfaceId, LinkEnd> interfaces;

    bool is_core_in(IsdId isd) const { return core_in.count(isd) > 0; }
    bool is_core() const { return !core_in.empty(); }
    bool is_member_of(IsdId isd) const { return member_of.count(isd) > 0; }
};

/// Role-aware neighbor query. Customer/Provider split the directed
/// provider-to-customer relation from the perspective of the queried AS.
enum class NeighborKind { Core, Customer, Provider, Peer };

struct Neighbor {
    AsId peer;
    InterfaceId local_if = 0;
    InterfaceId remote_if = 0;
    std::uint32_t link_index = 0;

    auto operator<=>(const Neighbor&) const = default;
};

/// The immutable AS-level world model: ISDs, ASes, and typed links.
///
/// Loaded from a line-oriented text document:
///
///   isd <isd-id>
///   as <isd>-<local> [core=<isd-list>] [member=<isd-list>] [labels=<list>]
///   link <asA> <ifA> <asB> <ifB> <CORE|P2C|PEER> [labels=<list>]
///
/// '#' starts a comment. Declarations are order-insensitive except that an
/// AS must be declared before its links. For P2C links asA is the provider.
class Topology {
  public:
    /// Parses and validates. Throws ParseError for malformed documents and
    /// ValidationError naming the violated invariant otherwise.
    static Topology parse(std::string_view text);
    static Topology load_file(const std::string& path);

    /// Canonical text form; parsing it again yields an identical topology.
    std::string serialize() const;

    const std::set<IsdId>& isds() const { return isds_; }
    const std::map<AsId, AsNode>& ases() const { return ases_; }
    const std::vector<Link>& links() const { return links_; }

    bool has_as(const AsId& as) const { return ases_.count(as) > 0; }
    const AsNode& as_node(const AsId& as) const;

    /// Links of the given role incident to `as`, sorted. Throws
    /// ValidationError for an unknown AS.
    std::vector<Neighbor> neighbors(const AsId& as, NeighborKind kind) const;

    /// LinkType overload: ProviderToCustomer is interpreted as "links where
    /// `as` is the provider".
    std::vector<Neighbor> neighbors(const AsId& as, LinkType kind) const;

    /// The link attached to (as, interface), or nullptr.
    const Link* find_link(const AsId& as, InterfaceId ifid) const;
    const Link* find_link_by_id(std::string_view link_id) const;

    std::vector<AsId> core_ases(IsdId isd) const;
    std::vector<AsId> members_of(IsdId isd) const;

    /// Unordered ISD pairs that share at least one link (an endpoint AS of
    /// the link is a member of each). Drives TRC cross-signing.
    std::vector<std::pair<IsdId, IsdId>> isd_adjacency() const;

    /// Non-fatal findings collected during validation (e.g. an AS that is
    /// core in one ISD but a plain member of another).
    const std::vector<std::string>& warnings() const { return warnings_; }

  private:
    void validate();

    std::set<IsdId> isds_;
    std::map<AsId, AsNode> ases_;
    std::vector<Link> links_;
    std::vector<std::string> warnings_;
};

}  // namespace scion
