// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "vulcan/common/codec.hpp"
#include "vulcan/common/error.hpp"
#include "vulcan/crypto/hash.hpp"
#include "vulcan/crypto/signature.hpp"
#include "vulcan/crypto/signer_index.hpp"

namespace vulcan::crypto {
namespace {

TEST(Hash, KnownVectors) {
    EXPECT_EQ(sha256("").hex(), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256("abc").hex(), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    Hasher h;
    h.update("a").update("bc");
    EXPECT_EQ(h.finish(), sha256("abc"));
}

TEST(Codec, BigEndianAndLengthPrefix) {
    ByteWriter w;
    w.u8(1).u32(0x0203'0405).u64(6).var("xy");
    EXPECT_EQ(to_hex(w.bytes()), "01020304050000000000000006000000027879");
    EXPECT_EQ(from_hex("0x0aff"), (Bytes{0x0a, 0xff}));
    EXPECT_THROW(from_hex("abc"), Error);
    EXPECT_THROW(from_hex("zz"), Error);
}

class SchemeTest : public ::testing::TestWithParam<std::string> {
  protected:
    void SetUp() override { scheme = make_scheme(GetParam()); }
    std::unique_ptr<SignatureScheme> scheme;
};

TEST_P(SchemeTest, KeygenIsDeterministic) {
    Seed zero{};
    auto a = scheme->keygen(zero);
    auto b = scheme->keygen(zero);
    EXPECT_EQ(a.public_key, b.public_key);
    EXPECT_EQ(a.secret_key.bytes, b.secret_key.bytes);
    EXPECT_NE(scheme->keygen(derive_seed("k", 1)).public_key, a.public_key);
}

TEST_P(SchemeTest, HundredSeedsGiveDistinctKeys) {
    std::mt19937_64 rng(7);
    std::set<PublicKey> keys;
    for (int i = 0; i < 100; ++i) {
        Seed s;
        for (auto& b : s) b = static_cast<std::uint8_t>(rng());
        keys.insert(scheme->keygen(s).public_key);
    }
    EXPECT_EQ(keys.size(), 100U);
}

TEST_P(SchemeTest, SignVerifyRoundTripAndExhaustiveBitFlip) {
    auto kp = scheme->keygen(derive_seed("signer", 0));
    const Bytes msg = {'h', 'e', 'l', 'l', 'o'};
    auto sig = scheme->sign(msg, kp.secret_key);
    EXPECT_EQ(sig.bytes.size(), scheme->signature_size());
    EXPECT_TRUE(scheme->verify(msg, sig, kp.public_key));
    for (std::size_t bit = 0; bit < msg.size() * 8; ++bit) {
        Bytes m = msg;
        m[bit / 8] ^= static_cast<std::uint8_t>(1U << (bit % 8));
        EXPECT_FALSE(scheme->verify(m, sig, kp.public_key)) << "bit " << bit;
    }
    auto other = scheme->keygen(derive_seed("signer", 1));
    EXPECT_FALSE(scheme->verify(msg, sig, other.public_key));
}

TEST_P(SchemeTest, MalformedSignatureReturnsFalse) {
    auto kp = scheme->keygen(derive_seed("signer", 0));
    const Bytes msg = {1, 2, 3};
    EXPECT_FALSE(scheme->verify(msg, Signature{}, kp.public_key));
    EXPECT_FALSE(scheme->verify(msg, Signature{Bytes(7, 0xff)}, kp.public_key));
    EXPECT_FALSE(scheme->verify(msg, Signature{Bytes(scheme->signature_size(), 0xff)}, kp.public_key));
    EXPECT_FALSE(scheme->verify(msg, scheme->sign(msg, kp.secret_key), PublicKey{Bytes(3, 1)}));
    EXPECT_FALSE(scheme->verify_aggregate({}, AggregateSignature{Bytes(scheme->signature_size(), 0)}));
}

TEST_P(SchemeTest, CombineEmptyThrows) {
    EXPECT_THROW((void)scheme->combine({}), CryptoError);
}

TEST_P(SchemeTest, AggregateRoundTripOrderInsensitiveAndFixedLength) {
    const Digest block = sha256("block");
    std::vector<SignedMessage> parts;
    std::vector<KeyMessage> pairs;
    for (std::uint64_t i = 0; i < 5; ++i) {
        auto kp = scheme->keygen(derive_seed("v", i));
        Bytes m(block.bytes.begin(), block.bytes.end());
        parts.push_back({kp.public_key, m, scheme->sign(m, kp.secret_key)});
        pairs.push_back({kp.public_key, m});
        auto agg = scheme->combine(std::span(parts));
        EXPECT_EQ(agg.bytes.size(), scheme->signature_size());
        EXPECT_TRUE(scheme->verify_aggregate(std::span(pairs), agg)) << "count " << i + 1;
    }
    auto forward = scheme->combine(std::span(parts));
    std::reverse(parts.begin(), parts.end());
    EXPECT_EQ(scheme->combine(std::span(parts)), forward);

    // Subset of the pairs must not verify.
    std::vector<KeyMessage> fewer(pairs.begin(), pairs.end() - 1);
    EXPECT_FALSE(scheme->verify_aggregate(std::span(fewer), forward));
}

TEST_P(SchemeTest, DistinctMessageAggregateRoundTrip) {
    std::vector<SignedMessage> parts;
    std::vector<KeyMessage> pairs;
    for (std::uint64_t i = 0; i < 3; ++i) {
        auto kp = scheme->keygen(derive_seed("d", i));
        Bytes m = {static_cast<std::uint8_t>(i), 9, 9};
        parts.push_back({kp.public_key, m, scheme->sign(m, kp.secret_key)});
        pairs.push_back({kp.public_key, m});
    }
    auto agg = scheme->combine(std::span(parts));
    EXPECT_TRUE(scheme->verify_aggregate(std::span(pairs), agg));
    pairs[1].message[0] ^= 1;
    EXPECT_FALSE(scheme->verify_aggregate(std::span(pairs), agg));
}

TEST_P(SchemeTest, AggregateMutationSweep) {
    const Digest block = sha256("sweep");
    const Bytes m(block.bytes.begin(), block.bytes.end());
    std::vector<PublicKey> keys;
    std::vector<Signature> sigs;
    for (std::uint64_t i = 0; i < 3; ++i) {
        auto kp = scheme->keygen(derive_seed("m", i));
        keys.push_back(kp.public_key);
        sigs.push_back(scheme->sign(m, kp.secret_key));
    }
    auto outsider = scheme->keygen(derive_seed("m", 99)).public_key;
    auto agg = scheme->combine_same(m, keys, sigs);
    ASSERT_TRUE(scheme->verify_same(m, keys, agg));
    for (std::size_t i = 0; i < keys.size(); ++i) {
        auto swapped = keys;
        swapped[i] = outsider;
        EXPECT_FALSE(scheme->verify_same(m, swapped, agg));
    }
    for (std::size_t byte = 0; byte < agg.bytes.size(); ++byte) {
        auto bad = agg;
        bad.bytes[byte] ^= 0x01;
        EXPECT_FALSE(scheme->verify_same(m, keys, bad)) << "byte " << byte;
    }
}

INSTANTIATE_TEST_SUITE_P(Schemes, SchemeTest, ::testing::Values("test", "bls12-381"),
                         [](const auto& info) { return info.param == "test" ? "Test" : "Bls"; });

TEST(Scheme, UnknownNameThrows) { EXPECT_THROW(make_scheme("rsa"), CryptoError); }

TEST(SignerIndex, WorkedExample) {
    auto idx = encode_signers({1, 3, 4}, 5);
    EXPECT_EQ(idx.value, 11U);
    EXPECT_EQ(idx.count(), 3U);
    EXPECT_TRUE(idx.contains(1));
    EXPECT_FALSE(idx.contains(0));
    EXPECT_EQ(decode_signers(idx), (std::set<std::size_t>{1, 3, 4}));
    EXPECT_EQ(encode_signers({}, 5).value, 0U);
}

// Oracle: value is the sum of 2^(n-1-j) over the set.
TEST(SignerIndex, ExhaustiveInverseUpToTen) {
    for (std::size_t n = 1; n <= 10; ++n) {
        for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
            std::set<std::size_t> s;
            std::uint64_t expect = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if ((mask >> j) & 1U) {
                    s.insert(j);
                    expect += 1ULL << (n - 1 - j);
                }
            }
            auto idx = encode_signers(s, n);
            ASSERT_EQ(idx.value, expect);
            ASSERT_EQ(idx.count(), s.size());
            ASSERT_EQ(decode_signers(idx), s);
        }
    }
}

TEST(SignerIndex, RejectsOutOfRange) {
    EXPECT_THROW(encode_signers({5}, 5), CryptoError);
    EXPECT_THROW(encode_signers({0}, 65), CryptoError);
    EXPECT_THROW(decode_signers(SignerIndex{1ULL << 5, 5}), CryptoError);
    auto full = encode_signers({0, 63}, 64);
    EXPECT_EQ(decode_signers(full), (std::set<std::size_t>{0, 63}));
}

}  // namespace
}  // namespace vulcan::crypto
