// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string_view>

#include "vulcan/common/bytes.hpp"

namespace vulcan::crypto {

/// Name of the single hash function used for every digest; recorded in run output.
inline constexpr std::string_view kHashName = "sha256";

Digest sha256(ByteView data);

inline Digest sha256(std::string_view s) { return sha256(as_view(s)); }

/// Incremental SHA-256.
class Hasher {
  public:
    Hasher();
    ~Hasher();
    Hasher(Hasher&&) noexcept;
    Hasher& operator=(Hasher&&) noexcept;
    Hasher(const Hasher&) = delete;
    Hasher& operator=(const Hasher&) = delete;

    Hasher& update(ByteView data);
    Hasher& update(std::string_view s) { return update(as_view(s)); }
    Hasher& update(const Digest& d) { return update(d.view()); }
    Hasher& update_u8(std::uint8_t v) { return update(ByteView{&v, 1}); }
    Digest finish();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace vulcan::crypto
