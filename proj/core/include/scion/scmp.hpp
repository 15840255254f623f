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

#include <functional>
#include <optional>

#include "scion/crypto.hpp"

namespace scion {

enum class ScmpType : std::uint8_t {
    RevokeInterface = 1,
    Echo = 2,
    Unreachable = 3,
};

std::string to_string(ScmpType t);

/// Control message, authenticated with a tag under the DRKey derived by the
/// issuer for the intended verifier — cheap to create in bulk, yet
/// unforgeable without the issuer's DRKey secret.
struct ScmpMessage {
    ScmpType type = ScmpType::Echo;
    AsId issuer;
    AsId subject_as;                 // for RevokeInterface
    InterfaceId subject_if = 0;
    std::int64_t timestamp_us = 0;
    std::array<std::uint8_t, 16> auth_tag{};

    Bytes signed_bytes() const;  // everything but the tag
};

/// Builds and tags a message for one verifier AS.
ScmpMessage scmp_auth(const AsSecrets& issuer, ScmpType type, const AsId& subject_as,
                      InterfaceId subject_if, std::int64_t timestamp_us,
                      const AsId& verifier);

/// Tag check under an already-obtained DRKey.
bool scmp_tag_valid(const DrKey& key, const ScmpMessage& message);

/// Cache-assisted verification: uses a fresh cached DRKey for the issuer or
/// fetches one through `exchange`. Returns nullopt when no key can be
/// obtained (the message is unverifiable, not invalid).
std::optional<bool> scmp_verify(
    const AsId& verifier, const ScmpMessage& message, DrKeyCache& cache,
    std::int64_t now_us,
    const std::function<std::optional<DrKey>(const AsId&)>& exchange);

}  // namespace scion
