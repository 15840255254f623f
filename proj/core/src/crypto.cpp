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

#include "scion/crypto.hpp"

#include <openssl/core_names.h>
#include <openssl/evp.h>


#include <cassert>
#include <cstring>
#include <memory>
#include <unordered_map>

namespace scion {

namespace {

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
struct PkeyDeleter {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;
using Pkey = std::unique_ptr<EVP_PKEY, PkeyDeleter>;

Pkey load_private(const PrivateKey& key) {
    return Pkey(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                             key.data(), key.size()));
}

Pkey load_public(const PublicKey& key) {
    return Pkey(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr,
                                            key.data(), key.size()));
}

}  // namespace

KeyPair KeyPair::from_seed(const std::array<std::uint8_t, 32>& seed) {
    KeyPair kp;
    kp.private_key = seed;
    Pkey sk = load_private(kp.private_key);
    if (!sk) throw Error("ed25519 key generation failed");
    std::size_t len = kp.public_key.size();
    if (EVP_PKEY_get_raw_public_key(sk.get(), kp.public_key.data(), &len) != 1 ||
        len != kp.public_key.size())
        throw Error("ed25519 public key extraction failed");
    return kp;
}

Signature sign(const PrivateKey& key, std::span<const std::uint8_t> message) {
    Pkey sk = load_private(key);
    if (!sk) throw Error("malformed signing key");
    MdCtx ctx(EVP_MD_CTX_new());
    Signature sig{};
    std::size_t siglen = sig.size();
    if (EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, sk.get()) != 1 ||
        EVP_DigestSign(ctx.get(), sig.data(), &siglen, message.data(),
                       message.size()) != 1 ||
        siglen != sig.size())
        throw Error("signing failed");
    return sig;
}

bool verify(const PublicKey& key, std::span<const std::uint8_t> message,
            const Signature& signature) {
    Pkey pk = load_public(key);
    if (!pk) return false;
    MdCtx ctx(EVP_MD_CTX_new());
    if (EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, pk.get()) != 1)
        return false;
    return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                            message.data(), message.size()) == 1;
}

namespace {

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data) {
    std::array<std::uint8_t, 32> out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(),
                   nullptr) != 1 ||
        len != out.size())
        throw Error("sha256 failed");
    return out;
}

}  // namespace

std::array<std::uint8_t, 32> expand_seed(std::uint64_t seed, std::string_view tag) {
    Bytes input;
    for (int i = 0; i < 8; ++i)
        input.push_back(static_cast<std::uint8_t>(seed >> (8 * i)));
    input.insert(input.end(), tag.begin(), tag.end());
    return sha256(input);
}

SymKey cmac128(const SymKey& key, std::span<const std::uint8_t> message) {
    struct MacDeleter {
        void operator()(EVP_MAC* p) const { EVP_MAC_free(p); }
    };
    struct MacCtxDeleter {
        void operator()(EVP_MAC_CTX* p) const { EVP_MAC_CTX_free(p); }
    };
    static const std::unique_ptr<EVP_MAC, MacDeleter> mac(
        EVP_MAC_fetch(nullptr, "CMAC", nullptr));
    if (!mac) throw Error("CMAC unavailable");
    std::unique_ptr<EVP_MAC_CTX, MacCtxDeleter> ctx(EVP_MAC_CTX_new(mac.get()));
    char cipher[] = "AES-128-CBC";
    OSSL_PARAM params[] = {
        OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_CIPHER, cipher, 0),
        OSSL_PARAM_construct_end()};
    SymKey out{};
    std::size_t outlen = 0;
    if (EVP_MAC_init(ctx.get(), key.data(), key.size(), params) != 1 ||
        EVP_MAC_update(ctx.get(), message.data(), message.size()) != 1 ||
        EVP_MAC_final(ctx.get(), out.data(), &outlen, out.size()) != 1 ||
        outlen != out.size())
        throw Error("CMAC computation failed");
    return out;
}

std::uint32_t mac24(const SymKey& key, std::span<const std::uint8_t> payload) {
    assert(payload.size() <= 32);
    SymKey tag = cmac128(key, payload);
    return (std::uint32_t{tag[0]} << 16) | (std::uint32_t{tag[1]} << 8) | tag[2];
}

AsSecrets AsSecrets::derive(const AsId& owner, std::uint64_t world_seed) {
    AsSecrets s;
    s.owner = owner;
    s.signing = KeyPair::from_seed(expand_seed(world_seed, "sign/" + owner.to_string()));
    auto mac_full = expand_seed(world_seed, "mac/" + owner.to_string());
    auto drkey_full = expand_seed(world_seed, "drkey/" + owner.to_string());
    std::memcpy(s.mac_secret.data(), mac_full.data(), s.mac_secret.size());
    std::memcpy(s.drkey_secret.data(), drkey_full.data(), s.drkey_secret.size());
    return s;
}

DrKey derive_drkey(const AsSecrets& secrets, const AsId& peer) {
    ByteWriter w;
    w.as_id(peer);
    DrKey key;
    key.from_as = secrets.owner;
    key.to_as = peer;
    key.key = cmac128(secrets.drkey_secret, w.bytes());
    return key;
}

std::optional<DrKey> DrKeyCache::lookup(const AsId& origin, std::int64_t now_us) const {
    auto it = keys_.find(origin);
    if (it == keys_.end()) return std::nullopt;
    if (now_us - it->second.fetched_at_us >= kDrKeyMaxAgeUs) return std::nullopt;
    return it->second;
}

void DrKeyCache::insert(DrKey key) { keys_[key.from_as] = key; }

std::optional<DrKey> DrKeyCache::fetch(
    const AsId& origin, std::int64_t now_us,
    const std::function<std::optional<DrKey>(const AsId&)>& exchange) {
    if (auto hit = lookup(origin, now_us)) return hit;
    auto fetched = exchange(origin);
    if (!fetched) return std::nullopt;
    fetched->fetched_at_us = now_us;
    insert(*fetched);
    return fetched;
}

bool VerifyMemo::verify(const PublicKey& key, std::span<const std::uint8_t> message,
                        const Signature& signature) {
    struct Digest {
        std::array<std::uint8_t, 32> value{};
        bool operator==(const Digest&) const = default;
    };
    struct DigestHash {
        std::size_t operator()(const Digest& d) const {
            std::uint64_t h;
            std::memcpy(&h, d.value.data(), sizeof(h));
            return static_cast<std::size_t>(h);
        }
    };
    thread_local std::unordered_map<Digest, bool, DigestHash> memo;

    Bytes input;
    input.reserve(key.size() + message.size() + signature.size());
    input.insert(input.end(), key.begin(), key.end());
    input.insert(input.end(), message.begin(), message.end());
    input.insert(input.end(), signature.begin(), signature.end());
    Digest d;
    d.value = sha256(input);

    auto it = memo.find(d);
    if (it != memo.end()) return it->second;
    bool ok = scion::verify(key, message, signature);
    memo.emplace(d, ok);
    return ok;
}

}  // namespace scion
