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
#include <string>
#include <vector>

#include "scion/crypto.hpp"
#include "scion/ids.hpp"
#include "scion/topology.hpp"

namespace scion {

/// Trust Root Configuration: the versioned, quorum-signed set of trust roots
/// of one ISD. Version 1 is axiomatically trusted when a world is loaded;
/// every later version must carry quorum_trc signatures by the roots of the
/// version it replaces.
struct Trc {
    IsdId isd = 0;
    std::uint32_t version = 0;
    std::vector<std::pair<std::string, PublicKey>> trust_roots;  // (role label, key)
    std::uint16_t quorum_cert = 1;  // signatures required per AS certificate
    std::uint16_t quorum_trc = 1;   // signatures required to update the TRC
    std::vector<std::pair<std::uint16_t, Signature>> signatures;  // by previous roots
    std::map<IsdId, std::pair<std::uint16_t, Signature>> cross_signatures;

    /// Canonical body: length-prefixed fields in declaration order, excluding
    /// both signature lists. All signatures cover this encoding.
    Bytes canonical_body() const;

    /// Appends a signature by `root_index` of the previous version's roots.
    void add_signature(std::uint16_t root_index, const PrivateKey& key);
};

Bytes trc_self_sign_input(const Trc& trc);
Bytes trc_cross_sign_input(const Trc& trc, IsdId signer_isd);

/// AS certificate: binds an AS to its signing key under a TRC version of the
/// AS's home ISD.
struct AsCert {
    AsId subject;
    PublicKey public_key{};
    std::int64_t not_before_s = 0;  // simulated seconds
    std::int64_t not_after_s = 0;
    std::uint32_t trc_version = 0;
    std::vector<std::pair<std::uint16_t, Signature>> issuer_signatures;

    Bytes canonical_body() const;
    void add_signature(std::uint16_t root_index, const PrivateKey& key);
};

enum class CertVerdict {
    Ok,
    UnknownTrc,   // referenced TRC version not in the store; fetch and retry
    QuorumUnmet,  // fewer than quorum_cert valid root signatures
    Expired,      // validity window does not contain now
    WrongIsd,     // subject's home ISD differs from the TRC's
};

std::string to_string(CertVerdict v);

enum class TrcUpdateResult {
    Accepted,
    RejectedMissingIntermediate,  // version gap > 1
    RejectedQuorum,               // quorum_trc of previous roots unmet
    RejectedStale,                // version not greater than the stored one
    RejectedNoBootstrap,          // version 1 for an ISD already bootstrapped
};

std::string to_string(TrcUpdateResult r);

/// Per-AS store of TRCs, all versions per ISD. The current version per ISD
/// never decreases.
class TrcStore {
  public:
    /// Installs version 1 without verification. Roots are axiomatically
    /// trusted at world load.
    void bootstrap(Trc trc);

    /// Verified update path for versions > 1 (and first-contact version 1
    /// for foreign ISDs, which callers must have chain-verified).
    TrcUpdateResult update(const Trc& trc);

    const Trc* get(IsdId isd, std::uint32_t version) const;
    const Trc* latest(IsdId isd) const;
    std::optional<std::uint32_t> current_version(IsdId isd) const;

    std::vector<IsdId> known_isds() const;

  private:
    std::map<IsdId, std::map<std::uint32_t, Trc>> trcs_;
};

/// Pure verdict over (cert, store contents, now); no side effects.
CertVerdict validate_cert_chain(const AsCert& cert, const TrcStore& store,
                                std::int64_t now_us);

/// Extends `trc` with a signature under ISD `signer_isd`'s roots. The two
/// ISDs must share at least one link in `topo`; self-signing is rejected.
/// Throws ValidationError otherwise.
void cross_sign(Trc& trc, IsdId signer_isd, std::uint16_t root_index,
                const PrivateKey& signer_key, const Topology& topo);

/// Verifies that `trc` carries a valid cross-signature under `signer`.
bool verify_cross_signature(const Trc& trc, const Trc& signer);

/// Walks the shortest cross-signature chain from an ISD whose TRC the caller
/// trusts to the target ISD, over pairs of ISDs that share a link. Ties are
/// broken by ascending ISD number. Returns the chain [trusted..target] when
/// every step verifies.
std::optional<std::vector<IsdId>> verify_trc_chain(
    IsdId trusted, IsdId target,
    const std::map<IsdId, Trc>& latest_trcs,
    const std::vector<std::pair<IsdId, IsdId>>& adjacency);

/// Cache of other ASes' certificates.
class CertStore {
  public:
    void put(AsCert cert) { certs_[cert.subject] = std::move(cert); }
    const AsCert* get(const AsId& subject) const {
        auto it = certs_.find(subject);
        return it == certs_.end() ? nullptr : &it->second;
    }
    std::size_t size() const { return certs_.size(); }

  private:
    std::map<AsId, AsCert> certs_;
};

}  // namespace scion
