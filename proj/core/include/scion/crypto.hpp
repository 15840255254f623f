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

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>

#include "scion/bytes.hpp"
#include "scion/ids.hpp"

namespace scion {

using SymKey = std::array<std::uint8_t, 16>;
using Signature = std::array<std::uint8_t, 64>;
using PublicKey = std::array<std::uint8_t, 32>;
using PrivateKey = std::array<std::uint8_t, 32>;  // Ed25519 seed form

inline constexpr std::uint8_t kSchemeEd25519 = 1;

/// Ed25519 key pair. The private key is the 32-byte seed, so key material is
/// reproducible from a deterministic seed expander.
struct KeyPair {
    PublicKey public_key{};
    PrivateKey private_key{};
    std::uint8_t scheme_tag = kSchemeEd25519;

    static KeyPair from_seed(const std::array<std::uint8_t, 32>& seed);
};

Signature sign(const PrivateKey& key, std::span<const std::uint8_t> message);
bool verify(const PublicKey& key, std::span<const std::uint8_t> message,
            const Signature& signature);

/// Deterministic 32-byte expansion of (seed, tag), used to derive all key
/// material for a simulated world from the scenario seed.
std::array<std::uint8_t, 32> expand_seed(std::uint64_t seed, std::string_view tag);

/// AES-128-CMAC, the PRF underneath hop MACs, DRKey derivation, and SCMP tags.
SymKey cmac128(const SymKey& key, std::span<const std::uint8_t> message);

/// Truncated keyed PRF tag for hop fields. Payload must be at most 32 bytes.
std::uint32_t mac24(const SymKey& key, std::span<const std::uint8_t> payload);

/// Long-term secrets of one AS. The MAC secret is shared between the AS's
/// beacon server and its border routers and never leaves the AS; the DRKey
/// secret leaves it only as derived per-peer keys.
struct AsSecrets {
    AsId owner;
    KeyPair signing;
    SymKey mac_secret{};
    SymKey drkey_secret{};

    static AsSecrets derive(const AsId& owner, std::uint64_t world_seed);
};

/// Per-AS-pair symmetric key, derivable on the fly by `from_as` and fetched
/// (then cached) by everyone else.
struct DrKey {
    AsId from_as;
    AsId to_as;
    SymKey key{};
    std::int64_t fetched_at_us = 0;
};

DrKey derive_drkey(const AsSecrets& secrets, const AsId& peer);

inline constexpr std::int64_t kDrKeyMaxAgeUs = 3600ll * 1'000'000;  // one hour

/// Cache of fetched DRKeys, keyed by originating AS.
class DrKeyCache {
  public:
    /// Fresh cached key for `origin`, if any.
    std::optional<DrKey> lookup(const AsId& origin, std::int64_t now_us) const;
    void insert(DrKey key);
    void clear() { keys_.clear(); }

    /// Returns the cached key or invokes `exchange` (one counted round trip
    /// to the origin AS) and caches its result. A nullopt exchange result is
    /// a fetch failure and leaves the cache unchanged.
    std::optional<DrKey> fetch(
        const AsId& origin, std::int64_t now_us,
        const std::function<std::optional<DrKey>(const AsId&)>& exchange);

  private:
    std::map<AsId, DrKey> keys_;
};

/// Process-wide memo for signature verification. Verification is a pure
/// function of (key, message, signature); the memo collapses the repeated
/// re-validation of shared beacon prefixes across simulated ASes.
class VerifyMemo {
  public:
    static bool verify(const PublicKey& key, std::span<const std::uint8_t> message,
                       const Signature& signature);
};

}  // namespace scion
