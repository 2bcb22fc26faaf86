// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace vulcan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class CryptoError : public Error {
  public:
    using Error::Error;
};

class MerkleError : public Error {
  public:
    using Error::Error;
};

class ChainError : public Error {
  public:
    using Error::Error;
};

class ContractError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace vulcan
