// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

#include "vulcan/common/bytes.hpp"

namespace vulcan {

// Canonical encoding used for every hashed or signed structure:
//   u8/u32/u64   fixed width, big endian
//   var bytes    u32 length prefix followed by the raw bytes
//   digest       32 raw bytes, no prefix
class ByteWriter {
  public:
    ByteWriter& u8(std::uint8_t v);
    ByteWriter& u32(std::uint32_t v);
    ByteWriter& u64(std::uint64_t v);
    ByteWriter& var(ByteView data);
    ByteWriter& var(std::string_view s) { return var(as_view(s)); }
    ByteWriter& digest(const Digest& d);
    ByteWriter& raw(ByteView data);

    [[nodiscard]] const Bytes& bytes() const& { return out_; }
    [[nodiscard]] Bytes bytes() && { return std::move(out_); }

  private:
    Bytes out_;
};

}  // namespace vulcan
