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

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace scion {

/// Isolation domain number. Nonzero, globally unique.
using IsdId = std::uint16_t;

/// Interface identifier, local to the owning AS. 12-bit range (1..4095);
/// 0 is reserved as "no interface" (origination / terminal hop fields).
using InterfaceId = std::uint16_t;

inline constexpr InterfaceId kNoInterface = 0;
inline constexpr InterfaceId kMaxInterface = 4095;

/// AS number: home isolation domain plus a 32-bit local part.
/// Printed as "<isd>-<local>", e.g. "1-20".
struct AsId {
    IsdId isd = 0;
    std::uint32_t local = 0;

    auto operator<=>(const AsId&) const = default;

    std::string to_string() const {
        return std::to_string(isd) + "-" + std::to_string(local);
    }

    /// Packs to a 48-bit integer (isd in the high 16 bits).
    std::uint64_t packed() const {
        return (static_cast<std::uint64_t>(isd) << 32) | local;
    }

    static AsId from_packed(std::uint64_t v) {
        return AsId{static_cast<IsdId>(v >> 32),
                    static_cast<std::uint32_t>(v & 0xffffffffu)};
    }

    static std::optional<AsId> parse(std::string_view s);
};

enum class LinkType : std::uint8_t {
    Core = 0,                ///< connects two core ASes
    ProviderToCustomer = 1,  ///< directed business relationship, a = provider
    Peering = 2,
};

std::string to_string(LinkType t);
std::optional<LinkType> link_type_from_string(std::string_view s);

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input document. Carries the 1-based offending line when known.
class ParseError : public Error {
  public:
    ParseError(std::string msg, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + std::move(msg)
                         : std::move(msg)),
          line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

/// Structurally well-formed input that violates a model invariant.
class ValidationError : public Error {
  public:
    using Error::Error;
};

}  // namespace scion
