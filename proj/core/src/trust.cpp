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

#include "scion/trust.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace scion {

Bytes Trc::canonical_body() const {
    ByteWriter w;
    w.u16(isd);
    w.u32(version);
    w.u16(static_cast<std::uint16_t>(trust_roots.size()));
    for (const auto& [label, key] : trust_roots) {
        w.str(label);
        w.blob(key);
    }
    w.u16(quorum_cert);
    w.u16(quorum_trc);
    return w.take();
}

Bytes trc_self_sign_input(const Trc& trc) {
    ByteWriter w;
    w.str("TSIG");
    w.raw(trc.canonical_body());
    return w.take();
}

Bytes trc_cross_sign_input(const Trc& trc, IsdId signer_isd) {
    ByteWriter w;
    w.str("XSIG");
    w.u16(signer_isd);
    w.raw(trc.canonical_body());
    return w.take();
}

void Trc::add_signature(std::uint16_t root_index, const PrivateKey& key) {
    signatures.emplace_back(root_index, sign(key, trc_self_sign_input(*this)));
}

Bytes AsCert::canonical_body() const {
    ByteWriter w;
    w.str("CERT");
    w.as_id(subject);
    w.blob(public_key);
    w.u64(static_cast<std::uint64_t>(not_before_s));
    w.u64(static_cast<std::uint64_t>(not_after_s));
    w.u32(trc_version);
    return w.take();
}

void AsCert::add_signature(std::uint16_t root_index, const PrivateKey& key) {
    issuer_signatures.emplace_back(root_index, sign(key, canonical_body()));
}

std::string to_string(CertVerdict v) {
    switch (v) {
        case CertVerdict::Ok: return "ok";
        case CertVerdict::UnknownTrc: return "unknown trc version";
        case CertVerdict::QuorumUnmet: return "quorum";
        case CertVerdict::Expired: return "expired";
        case CertVerdict::WrongIsd: return "wrong isd";
    }
    return "?";
}

std::string to_string(TrcUpdateResult r) {
    switch (r) {
        case TrcUpdateResult::Accepted: return "accepted";
        case TrcUpdateResult::RejectedMissingIntermediate: return "missing intermediate";
        case TrcUpdateResult::RejectedQuorum: return "quorum";
        case TrcUpdateResult::RejectedStale: return "stale version";
        case TrcUpdateResult::RejectedNoBootstrap: return "already bootstrapped";
    }
    return "?";
}

void TrcStore::bootstrap(Trc trc) {
    trcs_[trc.isd].emplace(trc.version, std::move(trc));
}

TrcUpdateResult TrcStore::update(const Trc& trc) {
    auto& versions = trcs_[trc.isd];
    if (versions.empty()) {
        if (trc.version != 1) return TrcUpdateResult::RejectedMissingIntermediate;
        versions.emplace(trc.version, trc);
        return TrcUpdateResult::Accepted;
    }
    std::uint32_t current = versions.rbegin()->first;
    if (trc.version <= current) return TrcUpdateResult::RejectedStale;
    if (trc.version != current + 1) return TrcUpdateResult::RejectedMissingIntermediate;

    const Trc& previous = versions.rbegin()->second;
    Bytes input = trc_self_sign_input(trc);
    std::set<std::uint16_t> valid_signers;
    for (const auto& [index, sig] : trc.signatures) {
        if (index >= previous.trust_roots.size()) continue;
        if (VerifyMemo::verify(previous.trust_roots[index].second, input, sig))
            valid_signers.insert(index);
    }
    if (valid_signers.size() < previous.quorum_trc)
        return TrcUpdateResult::RejectedQuorum;
    versions.emplace(trc.version, trc);
    return TrcUpdateResult::Accepted;
}

const Trc* TrcStore::get(IsdId isd, std::uint32_t version) const {
    auto it = trcs_.find(isd);
    if (it == trcs_.end()) return nullptr;
    auto vi = it->second.find(version);
    return vi == it->second.end() ? nullptr : &vi->second;
}

const Trc* TrcStore::latest(IsdId isd) const {
    auto it = trcs_.find(isd);
    if (it == trcs_.end() || it->second.empty()) return nullptr;
    return &it->second.rbegin()->second;
}

std::optional<std::uint32_t> TrcStore::current_version(IsdId isd) const {
    const Trc* trc = latest(isd);
    if (!trc) return std::nullopt;
    return trc->version;
}

std::vector<IsdId> TrcStore::known_isds() const {
    std::vector<IsdId> out;
    for (const auto& [isd, versions] : trcs_) out.push_back(isd);
    return out;
}

CertVerdict validate_cert_chain(const AsCert& cert, const TrcStore& store,
                                std::int64_t now_us) {
    const Trc* trc = store.get(cert.subject.isd, cert.trc_version);
    if (!trc) return CertVerdict::UnknownTrc;
    if (trc->isd != cert.subject.isd) return CertVerdict::WrongIsd;

    std::int64_t now_s = now_us / 1'000'000;
    if (now_s < cert.not_before_s || now_s >= cert.not_after_s)
        return CertVerdict::Expired;

    Bytes body = cert.canonical_body();
    std::set<std::uint16_t> valid_signers;
    for (const auto& [index, sig] : cert.issuer_signatures) {
        if (index >= trc->trust_roots.size()) continue;
        if (VerifyMemo::verify(trc->trust_roots[index].second, body, sig))
            valid_signers.insert(index);
    }
    if (valid_signers.size() < trc->quorum_cert) return CertVerdict::QuorumUnmet;
    return CertVerdict::Ok;
}

void cross_sign(Trc& trc, IsdId signer_isd, std::uint16_t root_index,
                const PrivateKey& signer_key, const Topology& topo) {
    if (signer_isd == trc.isd)
        throw ValidationError("an ISD cannot cross-sign its own TRC");
    bool adjacent = false;
    for (const auto& [x, y] : topo.isd_adjacency()) {
        if ((x == trc.isd && y == signer_isd) || (x == signer_isd && y == trc.isd)) {
            adjacent = true;
            break;
        }
    }
    if (!adjacent)
        throw ValidationError("isds " + std::to_string(trc.isd) + " and " +
                              std::to_string(signer_isd) + " share no link");
    trc.cross_signatures[signer_isd] = {
        root_index, sign(signer_key, trc_cross_sign_input(trc, signer_isd))};
}

bool verify_cross_signature(const Trc& trc, const Trc& signer) {
    auto it = trc.cross_signatures.find(signer.isd);
    if (it == trc.cross_signatures.end()) return false;
    const auto& [index, sig] = it->second;
    if (index >= signer.trust_roots.size()) return false;
    return VerifyMemo::verify(signer.trust_roots[index].second,
                              trc_cross_sign_input(trc, signer.isd), sig);
}

std::optional<std::vector<IsdId>> verify_trc_chain(
    IsdId trusted, IsdId target,
    const std::map<IsdId, Trc>& latest_trcs,
    const std::vector<std::pair<IsdId, IsdId>>& adjacency) {
    if (trusted == target) return std::vector<IsdId>{trusted};

    std::map<IsdId, std::vector<IsdId>> peers;
    for (const auto& [a, b] : adjacency) {
        peers[a].push_back(b);
        peers[b].push_back(a);
    }
    for (auto& [isd, list] : peers) std::sort(list.begin(), list.end());

    // Breadth-first search; the first path found is shortest with ties broken
    // by ascending ISD number thanks to the sorted expansion order.
    std::map<IsdId, IsdId> parent;
    std::deque<IsdId> frontier{trusted};
    parent[trusted] = trusted;
    while (!frontier.empty()) {
        IsdId cur = frontier.front();
        frontier.pop_front();
        if (cur == target) break;
        for (IsdId next : peers[cur]) {
            if (parent.count(next)) continue;
            parent[next] = cur;
            frontier.push_back(next);
        }
    }
    if (!parent.count(target)) return std::nullopt;

    std::vector<IsdId> chain;
    for (IsdId cur = target; cur != trusted; cur = parent[cur]) chain.push_back(cur);
    chain.push_back(trusted);
    std::reverse(chain.begin(), chain.end());

    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        auto signer = latest_trcs.find(chain[i]);
        auto signee = latest_trcs.find(chain[i + 1]);
        if (signer == latest_trcs.end() || signee == latest_trcs.end())
            return std::nullopt;
        if (!verify_cross_signature(signee->second, signer->second))
            return std::nullopt;
    }
    return chain;
}

}  // namespace scion
