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

#include "scion/scmp.hpp"

namespace scion {

std::string to_string(ScmpType t) {
    switch (t) {
        case ScmpType::RevokeInterface: return "REVOKE_INTERFACE";
        case ScmpType::Echo: return "ECHO";
        case ScmpType::Unreachable: return "UNREACHABLE";
    }
    return "?";
}

Bytes ScmpMessage::signed_bytes() const {
    ByteWriter w;
    w.str("SCMP");
    w.u8(static_cast<std::uint8_t>(type));
    w.as_id(issuer);
    w.as_id(subject_as);
    w.u16(subject_if);
    w.u64(static_cast<std::uint64_t>(timestamp_us));
    return w.take();
}

ScmpMessage scmp_auth(const AsSecrets& issuer, ScmpType type, const AsId& subject_as,
                      InterfaceId subject_if, std::int64_t timestamp_us,
                      const AsId& verifier) {
    ScmpMessage msg;
    msg.type = type;
    msg.issuer = issuer.owner;
    msg.subject_as = subject_as;
    msg.subject_if = subject_if;
    msg.timestamp_us = timestamp_us;
    DrKey key = derive_drkey(issuer, verifier);
    msg.auth_tag = cmac128(key.key, msg.signed_bytes());
    return msg;
}

bool scmp_tag_valid(const DrKey& key, const ScmpMessage& message) {
    return cmac128(key.key, message.signed_bytes()) == message.auth_tag;
}

std::optional<bool> scmp_verify(
    const AsId& /*verifier*/, const ScmpMessage& message, DrKeyCache& cache,
    std::int64_t now_us,
    const std::function<std::optional<DrKey>(const AsId&)>& exchange) {
    auto key = cache.fetch(message.issuer, now_us, exchange);
    if (!key) return std::nullopt;
    return scmp_tag_valid(*key, message);
}

}  // namespace scion
