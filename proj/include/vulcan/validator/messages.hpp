// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "vulcan/chain/types.hpp"

namespace vulcan::validator {

/// Client to validator.
struct TransferFunds {
    chain::Transaction tx;
};

/// Validator to validator gossip of an accepted transfer.
struct TxRequest {
    chain::Transaction tx;
};

/// txAck / txNotAck to a peer, txNotValid to a client.
struct TxReply {
    Digest tx_hash;
    bool accepted = false;
    std::string reason;
};

struct ProposedBlock {
    Epoch epoch = 0;
    std::uint32_t round = 1;
    chain::Block block;
};

/// blockApproved carries the approval; blockNotApproved does not.
struct BlockVote {
    Epoch epoch = 0;
    std::uint32_t round = 1;
    Digest block_hash;
    std::optional<chain::Approval> approval;
};

/// The leader's announcement that it submitted a checkpoint.
struct CommitEcho {
    Epoch epoch = 0;
    chain::Checkpoint cp;
};

/// Round `round` of `epoch` begins with an empty queue.
struct EpochRestart {
    Epoch epoch = 0;
    std::uint32_t round = 1;
};

/// One validator's signature on vote_out_message(epoch, slot, leader).
struct LeaderVote {
    Epoch epoch = 0;
    std::size_t slot = 0;
    crypto::PublicKey leader;
    std::size_t voter = 0;
    crypto::Signature signature;
};

/// Leader to the parties of an included transfer: signature on receipt_message(epoch, hash).
struct Receipt {
    Epoch epoch = 0;
    chain::Transaction tx;
    crypto::PublicKey leader;
    crypto::Signature signature;
};

using Message = std::variant<TransferFunds, TxRequest, TxReply, ProposedBlock, BlockVote, CommitEcho,
                             EpochRestart, LeaderVote, Receipt>;

/// Wire name, e.g. "transferFunds" or "proposedBlock".
std::string message_kind(const Message& m);

/// Canonical bytes: var(kind) followed by the fields in declaration order. Blocks are
/// carried as header, transfer list and the account map in key order.
Bytes encode_message(const Message& m);

Digest message_digest(const Message& m);

}  // namespace vulcan::validator
