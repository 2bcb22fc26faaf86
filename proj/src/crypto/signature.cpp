// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include "vulcan/crypto/signature.hpp"

#include <algorithm>

#include "vulcan/common/codec.hpp"
#include "vulcan/common/error.hpp"
#include "vulcan/crypto/hash.hpp"

namespace vulcan::crypto {

AggregateSignature SignatureScheme::combine_same(ByteView message, std::span<const PublicKey> keys,
                                                 std::span<const Signature> sigs) const {
    if (keys.size() != sigs.size()) throw CryptoError("key/signature count mismatch");
    std::vector<SignedMessage> parts;
    parts.reserve(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        parts.push_back({keys[i], Bytes(message.begin(), message.end()), sigs[i]});
    }
    return combine(parts);
}

bool SignatureScheme::verify_same(ByteView message, std::span<const PublicKey> keys,
                                  const AggregateSignature& agg) const {
    std::vector<KeyMessage> pairs;
    pairs.reserve(keys.size());
    for (const auto& k : keys) pairs.push_back({k, Bytes(message.begin(), message.end())});
    return verify_aggregate(pairs, agg);
}

namespace {

constexpr std::string_view kTestSkTag = "vulcan/test-scheme/sk";
constexpr std::string_view kTestPkTag = "vulcan/test-scheme/pk";
constexpr std::string_view kTestSigTag = "vulcan/test-scheme/sig";

Digest test_signature(const PublicKey& pk, ByteView message) {
    Hasher h;
    h.update(kTestSigTag);
    h.update(ByteWriter().var(pk.bytes).bytes());
    h.update(message);
    return h.finish();
}

// Big-endian addition modulo 2^256.
void add_into(std::array<std::uint8_t, 32>& acc, ByteView term) {
    unsigned carry = 0;
    for (int i = 31; i >= 0; --i) {
        unsigned sum = acc[i] + term[i] + carry;
        acc[i] = static_cast<std::uint8_t>(sum & 0xff);
        carry = sum >> 8;
    }
}

}  // namespace

KeyPair TestScheme::keygen(const Seed& seed) const {
    Hasher h;
    h.update(kTestSkTag).update(ByteView{seed.data(), seed.size()});
    Digest sk = h.finish();
    Hasher hp;
    hp.update(kTestPkTag).update(sk);
    Digest pk = hp.finish();
    return {SecretKey{Bytes(sk.bytes.begin(), sk.bytes.end())},
            PublicKey{Bytes(pk.bytes.begin(), pk.bytes.end())}};
}

Signature TestScheme::sign(ByteView message, const SecretKey& sk) const {
    Hasher hp;
    hp.update(kTestPkTag).update(sk.bytes);
    Digest pk = hp.finish();
    Digest sig = test_signature(PublicKey{Bytes(pk.bytes.begin(), pk.bytes.end())}, message);
    return {Bytes(sig.bytes.begin(), sig.bytes.end())};
}

bool TestScheme::verify(ByteView message, const Signature& sig, const PublicKey& pk) const {
    if (sig.bytes.size() != 32 || pk.bytes.size() != 32) return false;
    Digest expected = test_signature(pk, message);
    return std::equal(sig.bytes.begin(), sig.bytes.end(), expected.bytes.begin());
}

AggregateSignature TestScheme::combine(std::span<const SignedMessage> parts) const {
    if (parts.empty()) throw CryptoError("nothing to aggregate");
    std::array<std::uint8_t, 32> acc{};
    for (const auto& p : parts) {
        if (p.signature.bytes.size() != 32) throw CryptoError("malformed signature");
        add_into(acc, p.signature.bytes);
    }
    return {Bytes(acc.begin(), acc.end())};
}

bool TestScheme::verify_aggregate(std::span<const KeyMessage> pairs,
                                  const AggregateSignature& agg) const {
    if (pairs.empty() || agg.bytes.size() != 32) return false;
    std::array<std::uint8_t, 32> acc{};
    for (const auto& p : pairs) {
        if (p.public_key.bytes.size() != 32) return false;
        add_into(acc, test_signature(p.public_key, p.message).view());
    }
    return std::equal(acc.begin(), acc.end(), agg.bytes.begin());
}

std::unique_ptr<SignatureScheme> make_scheme(std::string_view name) {
    if (name == "test") return std::make_unique<TestScheme>();
    if (name == "bls12-381" || name == "bls") return std::make_unique<BlsScheme>();
    throw CryptoError("unknown signature scheme: " + std::string(name));
}

Seed derive_seed(std::string_view label, std::uint64_t index) {
    Hasher h;
    h.update(ByteWriter().var(label).u64(index).bytes());
    Digest d = h.finish();
    Seed seed;
    std::copy(d.bytes.begin(), d.bytes.end(), seed.begin());
    return seed;
}

}  // namespace vulcan::crypto
