// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include <blst.h>

#include <algorithm>
#include <memory>

#include "vulcan/common/error.hpp"
#include "vulcan/crypto/signature.hpp"

namespace vulcan::crypto {

namespace {

constexpr std::string_view kDst = "BLS_SIG_BLS12381G2_XMD:SHA-256_SSWU_RO_POP_";
constexpr std::size_t kPkSize = 48;
constexpr std::size_t kSigSize = 96;

const byte* dst_ptr() { return reinterpret_cast<const byte*>(kDst.data()); }

blst_scalar secret_from(const SecretKey& sk) {
    if (sk.bytes.size() != 32) throw CryptoError("malformed BLS secret key");
    blst_scalar s;
    blst_scalar_from_bendian(&s, sk.bytes.data());
    return s;
}

bool decode_pk(const PublicKey& pk, blst_p1_affine& out) {
    if (pk.bytes.size() != kPkSize) return false;
    if (blst_p1_uncompress(&out, pk.bytes.data()) != BLST_SUCCESS) return false;
    return !blst_p1_affine_is_inf(&out) && blst_p1_affine_in_g1(&out);
}

bool decode_sig(ByteView bytes, blst_p2_affine& out) {
    if (bytes.size() != kSigSize) return false;
    if (blst_p2_uncompress(&out, bytes.data()) != BLST_SUCCESS) return false;
    return blst_p2_affine_in_g2(&out);
}

}  // namespace

KeyPair BlsScheme::keygen(const Seed& seed) const {
    blst_scalar sk;
    blst_keygen(&sk, seed.data(), seed.size(), nullptr, 0);
    blst_p1 pk;
    blst_sk_to_pk_in_g1(&pk, &sk);

    KeyPair kp;
    kp.secret_key.bytes.resize(32);
    blst_bendian_from_scalar(kp.secret_key.bytes.data(), &sk);
    kp.public_key.bytes.resize(kPkSize);
    blst_p1_compress(kp.public_key.bytes.data(), &pk);
    return kp;
}

Signature BlsScheme::sign(ByteView message, const SecretKey& sk) const {
    blst_scalar s = secret_from(sk);
    blst_p2 h;
    blst_hash_to_g2(&h, message.data(), message.size(), dst_ptr(), kDst.size(), nullptr, 0);
    blst_p2 sig;
    blst_sign_pk_in_g1(&sig, &h, &s);
    Signature out;
    out.bytes.resize(kSigSize);
    blst_p2_compress(out.bytes.data(), &sig);
    return out;
}

bool BlsScheme::verify(ByteView message, const Signature& sig, const PublicKey& pk) const {
    blst_p1_affine pk_aff;
    blst_p2_affine sig_aff;
    if (!decode_pk(pk, pk_aff) || !decode_sig(sig.bytes, sig_aff)) return false;
    return blst_core_verify_pk_in_g1(&pk_aff, &sig_aff, true, message.data(), message.size(),
                                     dst_ptr(), kDst.size(), nullptr, 0) == BLST_SUCCESS;
}

AggregateSignature BlsScheme::combine(std::span<const SignedMessage> parts) const {
    if (parts.empty()) throw CryptoError("nothing to aggregate");
    blst_p2 acc;
    bool first = true;
    for (const auto& p : parts) {
        blst_p2_affine sig_aff;
        if (!decode_sig(p.signature.bytes, sig_aff)) throw CryptoError("malformed signature");
        if (first) {
            blst_p2_from_affine(&acc, &sig_aff);
            first = false;
        } else {
            blst_p2_add_or_double_affine(&acc, &acc, &sig_aff);
        }
    }
    AggregateSignature out;
    out.bytes.resize(kSigSize);
    blst_p2_compress(out.bytes.data(), &acc);
    return out;
}

bool BlsScheme::verify_aggregate(std::span<const KeyMessage> pairs,
                                 const AggregateSignature& agg) const {
    if (pairs.empty()) return false;
    blst_p2_affine sig_aff;
    if (!decode_sig(agg.bytes, sig_aff)) return false;

    std::vector<blst_p1_affine> keys(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (!decode_pk(pairs[i].public_key, keys[i])) return false;
    }

    const bool same_message = std::all_of(pairs.begin(), pairs.end(), [&](const KeyMessage& p) {
        return p.message == pairs.front().message;
    });
    if (same_message) {
        blst_p1 sum;
        blst_p1_from_affine(&sum, &keys[0]);
        for (std::size_t i = 1; i < keys.size(); ++i) blst_p1_add_or_double_affine(&sum, &sum, &keys[i]);
        blst_p1_affine sum_aff;
        blst_p1_to_affine(&sum_aff, &sum);
        const auto& m = pairs.front().message;
        return blst_core_verify_pk_in_g1(&sum_aff, &sig_aff, true, m.data(), m.size(), dst_ptr(),
                                         kDst.size(), nullptr, 0) == BLST_SUCCESS;
    }

    auto storage = std::make_unique<std::uint64_t[]>(blst_pairing_sizeof() / sizeof(std::uint64_t) + 1);
    auto* ctx = reinterpret_cast<blst_pairing*>(storage.get());
    blst_pairing_init(ctx, true, dst_ptr(), kDst.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& m = pairs[i].message;
        if (blst_pairing_aggregate_pk_in_g1(ctx, &keys[i], i == 0 ? &sig_aff : nullptr, m.data(),
                                            m.size(), nullptr, 0) != BLST_SUCCESS) {
            return false;
        }
    }
    blst_pairing_commit(ctx);
    return blst_pairing_finalverify(ctx, nullptr);
}

}  // namespace vulcan::crypto
