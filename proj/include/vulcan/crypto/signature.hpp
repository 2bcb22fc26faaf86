// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "vulcan/common/bytes.hpp"

namespace vulcan::crypto {

using Seed = std::array<std::uint8_t, 32>;

struct SecretKey {
    Bytes bytes;
};

/// Public keys double as validator and client identities.
struct PublicKey {
    Bytes bytes;

    auto operator<=>(const PublicKey&) const = default;
    [[nodiscard]] std::string hex() const { return to_hex(bytes); }
};

struct Signature {
    Bytes bytes;
    auto operator<=>(const Signature&) const = default;
};

/// Same length as a single Signature of the producing scheme.
struct AggregateSignature {
    Bytes bytes;
    auto operator<=>(const AggregateSignature&) const = default;
};

struct KeyPair {
    SecretKey secret_key;
    PublicKey public_key;
};

/// One (pk, m, sigma) triple handed to combine().
struct SignedMessage {
    PublicKey public_key;
    Bytes message;
    Signature signature;
};

/// One (pk, m) pair handed to verify_aggregate().
struct KeyMessage {
    PublicKey public_key;
    Bytes message;
};

/// KeyGen / Sign / Combine / Verify for an aggregate signature scheme.
///
/// All verification entry points return false on malformed input; they never throw.
class SignatureScheme {
  public:
    virtual ~SignatureScheme() = default;

    [[nodiscard]] virtual std::string_view name() const = 0;
    [[nodiscard]] virtual std::size_t signature_size() const = 0;

    /// Deterministic in the seed.
    [[nodiscard]] virtual KeyPair keygen(const Seed& seed) const = 0;
    [[nodiscard]] virtual Signature sign(ByteView message, const SecretKey& sk) const = 0;
    [[nodiscard]] virtual bool verify(ByteView message, const Signature& sig,
                                      const PublicKey& pk) const = 0;

    /// Throws CryptoError("nothing to aggregate") on an empty list. The result does not
    /// depend on the order of the triples.
    [[nodiscard]] virtual AggregateSignature combine(std::span<const SignedMessage> parts) const = 0;
    [[nodiscard]] virtual bool verify_aggregate(std::span<const KeyMessage> pairs,
                                                const AggregateSignature& agg) const = 0;

    // Convenience for the only pattern the protocol uses: many keys, one digest.
    [[nodiscard]] AggregateSignature combine_same(ByteView message,
                                                  std::span<const PublicKey> keys,
                                                  std::span<const Signature> sigs) const;
    [[nodiscard]] bool verify_same(ByteView message, std::span<const PublicKey> keys,
                                   const AggregateSignature& agg) const;
};

/// Hash-based stand-in. Signatures are SHA-256(tag || pk || m) and aggregation is
/// addition modulo 2^256, so anybody holding a public key can compute a valid signature.
/// It satisfies every functional contract of the interface and keeps simulations fast,
/// but offers no unforgeability against code that chooses to forge.
class TestScheme final : public SignatureScheme {
  public:
    [[nodiscard]] std::string_view name() const override { return "test"; }
    [[nodiscard]] std::size_t signature_size() const override { return 32; }
    [[nodiscard]] KeyPair keygen(const Seed& seed) const override;
    [[nodiscard]] Signature sign(ByteView message, const SecretKey& sk) const override;
    [[nodiscard]] bool verify(ByteView message, const Signature& sig,
                              const PublicKey& pk) const override;
    [[nodiscard]] AggregateSignature combine(std::span<const SignedMessage> parts) const override;
    [[nodiscard]] bool verify_aggregate(std::span<const KeyMessage> pairs,
                                        const AggregateSignature& agg) const override;
};

/// BLS over BLS12-381 (minimal-pubkey-size variant: 48-byte G1 keys, 96-byte G2
/// signatures), backed by blst. Uses the proof-of-possession ciphersuite tag; validator
/// keys are registered with the contract at deployment.
class BlsScheme final : public SignatureScheme {
  public:
    [[nodiscard]] std::string_view name() const override { return "bls12-381"; }
    [[nodiscard]] std::size_t signature_size() const override { return 96; }
    [[nodiscard]] KeyPair keygen(const Seed& seed) const override;
    [[nodiscard]] Signature sign(ByteView message, const SecretKey& sk) const override;
    [[nodiscard]] bool verify(ByteView message, const Signature& sig,
                              const PublicKey& pk) const override;
    [[nodiscard]] AggregateSignature combine(std::span<const SignedMessage> parts) const override;
    [[nodiscard]] bool verify_aggregate(std::span<const KeyMessage> pairs,
                                        const AggregateSignature& agg) const override;
};

/// "test" or "bls12-381"; throws CryptoError otherwise.
std::unique_ptr<SignatureScheme> make_scheme(std::string_view name);

/// Seed helper: SHA-256 of a domain label and a 64-bit index.
Seed derive_seed(std::string_view label, std::uint64_t index);

}  // namespace vulcan::crypto
