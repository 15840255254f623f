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

#include <gtest/gtest.h>

#include "support/world.hpp"

using namespace scion;
using testsupport::as;
using testsupport::data_path;

namespace {

std::vector<KeyPair> make_roots(int count, const std::string& tag) {
    std::vector<KeyPair> roots;
    for (int i = 0; i < count; ++i)
        roots.push_back(
            KeyPair::from_seed(expand_seed(99, tag + "/" + std::to_string(i))));
    return roots;
}

Trc make_trc(IsdId isd, std::uint32_t version, const std::vector<KeyPair>& roots,
             std::uint16_t quorum_cert, std::uint16_t quorum_trc) {
    Trc trc;
    trc.isd = isd;
    trc.version = version;
    trc.quorum_cert = quorum_cert;
    trc.quorum_trc = quorum_trc;
    for (std::size_t i = 0; i < roots.size(); ++i)
        trc.trust_roots.emplace_back("root-" + std::to_string(i), roots[i].public_key);
    return trc;
}

}  // namespace

TEST(TrcStore, UpdateWithQuorumAccepted) {
    auto v1_roots = make_roots(4, "v1");
    TrcStore store;
    store.bootstrap(make_trc(1, 1, v1_roots, 2, 4));

    Trc v2 = make_trc(1, 2, v1_roots, 2, 4);
    for (std::uint16_t i = 0; i < 4; ++i) v2.add_signature(i, v1_roots[i].private_key);
    EXPECT_EQ(store.update(v2), TrcUpdateResult::Accepted);
    EXPECT_EQ(store.current_version(1), 2u);
}

TEST(TrcStore, UpdateBelowQuorumRejected) {
    auto v1_roots = make_roots(4, "v1");
    TrcStore store;
    store.bootstrap(make_trc(1, 1, v1_roots, 2, 4));

    Trc v2 = make_trc(1, 2, v1_roots, 2, 4);
    for (std::uint16_t i = 0; i < 3; ++i) v2.add_signature(i, v1_roots[i].private_key);
    EXPECT_EQ(store.update(v2), TrcUpdateResult::RejectedQuorum);
    EXPECT_EQ(store.current_version(1), 1u);
}

TEST(TrcStore, VersionGapRejected) {
    auto v1_roots = make_roots(4, "v1");
    TrcStore store;
    store.bootstrap(make_trc(1, 1, v1_roots, 2, 4));

    Trc v3 = make_trc(1, 3, v1_roots, 2, 4);
    for (std::uint16_t i = 0; i < 4; ++i) v3.add_signature(i, v1_roots[i].private_key);
    EXPECT_EQ(store.update(v3), TrcUpdateResult::RejectedMissingIntermediate);
}

TEST(TrcStore, DuplicateSignersDoNotMeetQuorum) {
    auto v1_roots = make_roots(4, "v1");
    TrcStore store;
    store.bootstrap(make_trc(1, 1, v1_roots, 2, 4));

    Trc v2 = make_trc(1, 2, v1_roots, 2, 4);
    for (int i = 0; i < 4; ++i) v2.add_signature(0, v1_roots[0].private_key);
    EXPECT_EQ(store.update(v2), TrcUpdateResult::RejectedQuorum);
}

TEST(TrcStore, VersionNeverDecreases) {
    auto v1_roots = make_roots(4, "v1");
    TrcStore store;
    store.bootstrap(make_trc(1, 1, v1_roots, 2, 4));
    Trc v2 = make_trc(1, 2, v1_roots, 2, 4);
    for (std::uint16_t i = 0; i < 4; ++i) v2.add_signature(i, v1_roots[i].private_key);
    ASSERT_EQ(store.update(v2), TrcUpdateResult::Accepted);
    // Replaying the old chain head cannot roll the store back.
    EXPECT_EQ(store.update(v2), TrcUpdateResult::RejectedStale);
    Trc v1_again = make_trc(1, 1, v1_roots, 2, 4);
    EXPECT_EQ(store.update(v1_again), TrcUpdateResult::RejectedStale);
    EXPECT_EQ(store.current_version(1), 2u);
}

TEST(CertChain, QuorumOfTwoSatisfied) {
    auto roots = make_roots(4, "certs");
    TrcStore store;
    store.bootstrap(make_trc(1, 1, roots, 2, 4));

    AsCert cert;
    cert.subject = as("1-10");
    cert.public_key = KeyPair::from_seed(expand_seed(5, "as")).public_key;
    cert.not_before_s = 0;
    cert.not_after_s = 1000;
    cert.trc_version = 1;
    cert.add_signature(0, roots[0].private_key);
    EXPECT_EQ(validate_cert_chain(cert, store, 10'000'000), CertVerdict::QuorumUnmet);

    cert.add_signature(1, roots[1].private_key);
    EXPECT_EQ(validate_cert_chain(cert, store, 10'000'000), CertVerdict::Ok);

    // Outside the validity window.
    EXPECT_EQ(validate_cert_chain(cert, store, 2000ll * 1'000'000),
              CertVerdict::Expired);
}

TEST(CertChain, UnknownTrcThenFetchedSucceeds) {
    auto roots = make_roots(4, "fetch");
    TrcStore store;
    store.bootstrap(make_trc(1, 1, roots, 2, 4));

    Trc v2 = make_trc(1, 2, roots, 2, 4);
    for (std::uint16_t i = 0; i < 4; ++i) v2.add_signature(i, roots[i].private_key);

    AsCert cert;
    cert.subject = as("1-10");
    cert.public_key = KeyPair::from_seed(expand_seed(6, "as")).public_key;
    cert.not_before_s = 0;
    cert.not_after_s = 1000;
    cert.trc_version = 2;
    cert.add_signature(0, roots[0].private_key);
    cert.add_signature(1, roots[1].private_key);

    EXPECT_EQ(validate_cert_chain(cert, store, 0), CertVerdict::UnknownTrc);
    // The caller fetches the missing version and retries once.
    ASSERT_EQ(store.update(v2), TrcUpdateResult::Accepted);
    EXPECT_EQ(validate_cert_chain(cert, store, 0), CertVerdict::Ok);
}

TEST(CrossSign, AdjacentIsdsVerify) {
    Topology topo = Topology::load_file(data_path("fig.topo"));
    auto roots1 = make_roots(4, "isd1");
    auto roots2 = make_roots(4, "isd2");
    Trc trc1 = make_trc(1, 1, roots1, 2, 4);
    Trc trc2 = make_trc(2, 1, roots2, 2, 4);

    cross_sign(trc1, 2, 0, roots2[0].private_key, topo);
    EXPECT_TRUE(verify_cross_signature(trc1, trc2));

    // Self cross-signing is rejected.
    EXPECT_THROW(cross_sign(trc1, 1, 0, roots1[0].private_key, topo), ValidationError);
    // ISDs 1 and 4 share no link.
    auto roots4 = make_roots(4, "isd4");
    EXPECT_THROW(cross_sign(trc1, 4, 0, roots4[0].private_key, topo), ValidationError);
}

TEST(CrossSign, ChainAcrossTwoSteps) {
    Topology topo = Topology::load_file(data_path("fig.topo"));
    std::map<IsdId, std::vector<KeyPair>> roots;
    std::map<IsdId, Trc> trcs;
    for (IsdId isd : topo.isds()) {
        roots[isd] = make_roots(4, "isd" + std::to_string(isd));
        trcs[isd] = make_trc(isd, 1, roots[isd], 2, 4);
    }
    for (const auto& [a, b] : topo.isd_adjacency()) {
        cross_sign(trcs[a], b, 0, roots[b][0].private_key, topo);
        cross_sign(trcs[b], a, 0, roots[a][0].private_key, topo);
    }

    auto adjacency = topo.isd_adjacency();
    // Direct neighbors.
    auto direct = verify_trc_chain(2, 1, trcs, adjacency);
    ASSERT_TRUE(direct.has_value());
    EXPECT_EQ(*direct, (std::vector<IsdId>{2, 1}));

    // Non-adjacent: the shortest chain runs through ISD 2.
    auto chained = verify_trc_chain(4, 1, trcs, adjacency);
    ASSERT_TRUE(chained.has_value());
    EXPECT_EQ(*chained, (std::vector<IsdId>{4, 2, 1}));

    // Remove the needed cross-signature: the chain no longer verifies.
    trcs[1].cross_signatures.erase(2);
    EXPECT_FALSE(verify_trc_chain(4, 1, trcs, adjacency).has_value());
}

TEST(Trc, CanonicalBodyCoversRootsAndQuorums) {
    auto roots = make_roots(2, "canon");
    Trc trc = make_trc(1, 1, roots, 1, 2);
    Bytes body = trc.canonical_body();
    Trc changed = trc;
    changed.quorum_trc = 3;
    EXPECT_NE(body, changed.canonical_body());
    // Signatures are excluded from the body.
    Trc with_sig = trc;
    with_sig.add_signature(0, roots[0].private_key);
    EXPECT_EQ(body, with_sig.canonical_body());
}
