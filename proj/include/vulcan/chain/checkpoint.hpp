// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "vulcan/chain/types.hpp"

namespace vulcan::chain {

/// Smallest signer count strictly above n/2.
std::size_t quorum(std::size_t n);

/// Byte string a validator signs to approve a block: the raw header hash.
Bytes approval_message(const Digest& block_hash);

Approval make_approval(const crypto::SignatureScheme& scheme, std::size_t validator,
                       const crypto::SecretKey& sk, const Digest& block_hash);

/// Aggregates approvals on block_hash. Approvals for other hashes, duplicate validators,
/// out-of-range indices and bad signatures are skipped; throws ChainError
/// ("insufficient approvals") if fewer than quorum(n) distinct valid ones remain.
Checkpoint make_checkpoint(const crypto::SignatureScheme& scheme, const Digest& block_hash,
                           std::span<const Approval> approvals,
                           std::span<const crypto::PublicKey> roster);

bool verify_checkpoint(const crypto::SignatureScheme& scheme, const Checkpoint& cp,
                       std::span<const crypto::PublicKey> roster);

/// Throws ChainError if the account is not in the block.
ProofOfPossession make_pop(const AccountId& account, const Block& block);

/// Header matches the live checkpoint, the path verifies against its account root with
/// value == balance, and claimed <= balance. The caller checks that the path key is the
/// requesting client.
bool verify_pop(const Checkpoint& live, const ProofOfPossession& pop, Coins claimed);

/// Message signed by a validator voting a leader out of (epoch, slot).
Bytes vote_out_message(Epoch epoch, std::size_t slot, const crypto::PublicKey& leader);

/// Message a leader signs to acknowledge a transfer's inclusion in its epoch-`epoch` block;
/// clients keep these as evidence for interactive exits.
Bytes receipt_message(Epoch epoch, const Digest& tx_hash);

}  // namespace vulcan::chain
