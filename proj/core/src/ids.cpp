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

#include "scion/ids.hpp"

#include <charconv>

namespace scion {

namespace {

template <typename T>
bool parse_uint(std::string_view s, T& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::optional<AsId> AsId::parse(std::string_view s) {
    auto dash = s.find('-');
    if (dash == std::string_view::npos) return std::nullopt;
    std::uint16_t isd = 0;
    std::uint32_t local = 0;
    if (!parse_uint(s.substr(0, dash), isd)) return std::nullopt;
    if (!parse_uint(s.substr(dash + 1), local)) return std::nullopt;
    if (isd == 0) return std::nullopt;
    return AsId{isd, local};
}

std::string to_string(LinkType t) {
    switch (t) {
        case LinkType::Core: return "CORE";
        case LinkType::ProviderToCustomer: return "P2C";
        case LinkType::Peering: return "PEER";
    }
    return "?";
}

std::optional<LinkType> link_type_from_string(std::string_view s) {
    if (s == "CORE") return LinkType::Core;
    if (s == "P2C") return LinkType::ProviderToCustomer;
    if (s == "PEER") return LinkType::Peering;
    return std::nullopt;
}

}  // namespace scion
