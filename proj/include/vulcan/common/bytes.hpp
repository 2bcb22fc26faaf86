// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vulcan {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Coin amounts are unsigned counts of the smallest unit; there are no fees.
using Coins = std::uint64_t;

/// Simulation time in protocol units.
using Tick = std::uint64_t;

using Epoch = std::uint64_t;

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

inline ByteView as_view(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

/// A 256-bit digest value.
struct Digest {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const Digest&) const = default;

    [[nodiscard]] ByteView view() const { return {bytes.data(), bytes.size()}; }
    [[nodiscard]] bool is_zero() const;
    [[nodiscard]] std::string hex() const { return to_hex(view()); }
    /// First 8 bytes in hex, for logs.
    [[nodiscard]] std::string short_hex() const;

    static Digest from_hex(std::string_view hex);
    static Digest from_bytes(ByteView data);
};

}  // namespace vulcan
