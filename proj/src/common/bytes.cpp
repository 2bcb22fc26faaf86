// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include "vulcan/common/bytes.hpp"

#include <algorithm>

#include "vulcan/common/codec.hpp"
#include "vulcan/common/error.hpp"

namespace vulcan {

namespace {

int nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::string to_hex(ByteView data) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0f]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    if (hex.starts_with("0x")) hex.remove_prefix(2);
    if (hex.size() % 2 != 0) throw Error("odd-length hex string");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = nibble(hex[2 * i]);
        int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw Error("invalid hex digit");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

bool Digest::is_zero() const {
    return std::all_of(bytes.begin(), bytes.end(), [](auto b) { return b == 0; });
}

std::string Digest::short_hex() const { return to_hex(ByteView{bytes.data(), 8}); }

Digest Digest::from_hex(std::string_view hex) { return from_bytes(vulcan::from_hex(hex)); }

Digest Digest::from_bytes(ByteView data) {
    if (data.size() != 32) throw Error("digest must be 32 bytes");
    Digest d;
    std::copy(data.begin(), data.end(), d.bytes.begin());
    return d;
}

ByteWriter& ByteWriter::u8(std::uint8_t v) {
    out_.push_back(v);
    return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

ByteWriter& ByteWriter::var(ByteView data) {
    u32(static_cast<std::uint32_t>(data.size()));
    return raw(data);
}

ByteWriter& ByteWriter::digest(const Digest& d) { return raw(d.view()); }

ByteWriter& ByteWriter::raw(ByteView data) {
    out_.insert(out_.end(), data.begin(), data.end());
    return *this;
}

}  // namespace vulcan
