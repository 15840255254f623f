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
#include <string>
#include <variant>

#include "scion/crypto.hpp"
#include "scion/packet.hpp"

namespace scion {

enum class DropReason : std::uint8_t {
    Parse,
    Mac,
    Expired,
    WrongInterface,
    LinkDown,
    Malformed,
};

std::string to_string(DropReason r);

struct ActionForward {
    InterfaceId egress_if = 0;
    PacketHeader header;  // pointer advanced for the next AS
};

struct ActionDeliver {};

struct ActionDrop {
    DropReason reason;
};

/// Drop at a failed egress link: the router answers with an interface
/// revocation sent back along the reversed header path.
struct ActionDropRevoke {
    InterfaceId dead_if = 0;
    PacketHeader revoke_path;  // reversed header, positioned at this AS
};

using ForwardAction =
    std::variant<ActionForward, ActionDeliver, ActionDrop, ActionDropRevoke>;

/// One border-router decision. Inputs are deliberately only the AS's own
/// secrets, the packet header's path state, the arrival interface, the
/// liveness of the AS's own links, and the clock — there is no routing
/// table. Transit decisions never touch the packet's addresses.
///
/// `arrival_if == kNoInterface` marks a packet handed over by a local host.
ForwardAction forward(const AsSecrets& secrets, const PacketHeader& header,
                      InterfaceId arrival_if,
                      const std::function<bool(InterfaceId)>& link_up,
                      std::int64_t now_us);

}  // namespace scion
