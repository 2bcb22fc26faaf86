// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <set>

namespace vulcan::crypto {

/// Checkpoint signer bit index.
///
/// Validator j of n maps to bit (n - 1 - j), i.e. the first validator is the most
/// significant of n bits. With n = 5 and signers {1, 3, 4} the value is 0b01011 = 11.
/// Supports committees of up to 64 validators.
struct SignerIndex {
    std::uint64_t value = 0;
    std::size_t n = 0;

    auto operator<=>(const SignerIndex&) const = default;

    [[nodiscard]] std::size_t count() const;
    [[nodiscard]] bool contains(std::size_t validator) const;
};

inline constexpr std::size_t kMaxValidators = 64;

/// Throws CryptoError when an index is >= n or n exceeds kMaxValidators.
SignerIndex encode_signers(const std::set<std::size_t>& signers, std::size_t n);

/// Throws CryptoError when value has bits at or above position n.
std::set<std::size_t> decode_signers(const SignerIndex& index);

}  // namespace vulcan::crypto
