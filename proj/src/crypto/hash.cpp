// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include "vulcan/crypto/hash.hpp"

#include <openssl/evp.h>

#include "vulcan/common/error.hpp"

namespace vulcan::crypto {

struct Hasher::Impl {
    EVP_MD_CTX* ctx = nullptr;
    ~Impl() { EVP_MD_CTX_free(ctx); }
};

Hasher::Hasher() : impl_(std::make_unique<Impl>()) {
    impl_->ctx = EVP_MD_CTX_new();
    if (impl_->ctx == nullptr || EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1) {
        throw CryptoError("sha256 init failed");
    }
}

Hasher::~Hasher() = default;
Hasher::Hasher(Hasher&&) noexcept = default;
Hasher& Hasher::operator=(Hasher&&) noexcept = default;

Hasher& Hasher::update(ByteView data) {
    if (!data.empty() && EVP_DigestUpdate(impl_->ctx, data.data(), data.size()) != 1) {
        throw CryptoError("sha256 update failed");
    }
    return *this;
}

Digest Hasher::finish() {
    Digest out;
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(impl_->ctx, out.bytes.data(), &len) != 1 || len != out.bytes.size()) {
        throw CryptoError("sha256 finalize failed");
    }
    return out;
}

Digest sha256(ByteView data) {
    Digest out;
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.bytes.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw CryptoError("sha256 failed");
    }
    return out;
}

}  // namespace vulcan::crypto
