// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include "vulcan/crypto/signer_index.hpp"

#include <bit>
#include <string>

#include "vulcan/common/error.hpp"

namespace vulcan::crypto {

std::size_t SignerIndex::count() const { return static_cast<std::size_t>(std::popcount(value)); }

bool SignerIndex::contains(std::size_t validator) const {
    if (validator >= n) return false;
    return (value >> (n - 1 - validator)) & 1U;
}

SignerIndex encode_signers(const std::set<std::size_t>& signers, std::size_t n) {
    if (n > kMaxValidators) throw CryptoError("signer index supports at most 64 validators");
    SignerIndex idx{0, n};
    for (auto j : signers) {
        if (j >= n) {
            throw CryptoError("signer " + std::to_string(j) + " out of range for n=" + std::to_string(n));
        }
        idx.value |= std::uint64_t{1} << (n - 1 - j);
    }
    return idx;
}

std::set<std::size_t> decode_signers(const SignerIndex& index) {
    if (index.n > kMaxValidators) throw CryptoError("signer index supports at most 64 validators");
    if (index.n < kMaxValidators && (index.value >> index.n) != 0) {
        throw CryptoError("signer index has bits beyond n");
    }
    std::set<std::size_t> out;
    for (std::size_t j = 0; j < index.n; ++j) {
        if (index.contains(j)) out.insert(j);
    }
    return out;
}

}  // namespace vulcan::crypto
