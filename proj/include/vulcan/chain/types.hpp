// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string_view>
#include <vector>

#include "vulcan/common/bytes.hpp"
#include "vulcan/crypto/signature.hpp"
#include "vulcan/crypto/signer_index.hpp"
#include "vulcan/merkle/account_trie.hpp"

namespace vulcan::chain {

/// Accounts are identified by their public key.
using AccountId = crypto::PublicKey;
using Balances = std::map<AccountId, Coins>;

enum class TxKind : std::uint8_t {
    Transfer = 0,
    // Balance-change records mandated by the contract. They carry no signature and are
    // placed at the front of the block that follows the epoch they were recorded in.
    Deposit = 1,
    Withdraw = 2,
    Exit = 3,
};

std::string_view to_string(TxKind kind);

/// A sidechain transaction.
///
/// Transfer: sender pays receiver, signed by sender over signing_bytes().
/// Deposit: receiver is credited. Withdraw/Exit: sender is debited; an exit also removes
/// the account, so its amount must equal the full balance at that point.
struct Transaction {
    TxKind kind = TxKind::Transfer;
    AccountId sender;
    AccountId receiver;
    Coins amount = 0;
    Epoch epoch_tag = 0;
    crypto::Signature signature;

    /// Canonical bytes covered by the sender's signature.
    [[nodiscard]] Bytes signing_bytes() const;
    /// signing_bytes() followed by the length-prefixed signature.
    [[nodiscard]] Bytes encode() const;
    [[nodiscard]] Digest hash() const;
    [[nodiscard]] bool is_adjustment() const { return kind != TxKind::Transfer; }

    bool operator==(const Transaction&) const = default;
};

Transaction make_transfer(const crypto::SignatureScheme& scheme, const crypto::KeyPair& sender,
                          const AccountId& receiver, Coins amount, Epoch epoch_tag);
Transaction make_adjustment(TxKind kind, const AccountId& client, Coins amount, Epoch recorded_in);

/// Affected account of a balance-change record.
const AccountId& adjustment_account(const Transaction& tx);

struct BlockHeader {
    Epoch epoch = 0;
    Digest prev_block_hash;
    Digest last_checkpoint;
    Digest tx_root;
    Digest account_root;

    [[nodiscard]] Bytes encode() const;
    [[nodiscard]] Digest hash() const;

    bool operator==(const BlockHeader&) const = default;
};

struct Block {
    BlockHeader header;
    std::vector<Transaction> txs;
    /// Full post-state.
    Balances accounts;
    /// Trie over `accounts`; kept alongside for proof generation.
    merkle::AccountTrie trie;

    [[nodiscard]] Digest hash() const { return header.hash(); }
};

/// Builds the account trie for a balance map.
merkle::AccountTrie build_trie(const Balances& balances);

struct Checkpoint {
    Digest block_hash;
    crypto::AggregateSignature qc;
    crypto::SignerIndex index;

    [[nodiscard]] Bytes encode() const;
    [[nodiscard]] Digest hash() const;

    bool operator==(const Checkpoint&) const = default;
};

struct ProofOfPossession {
    BlockHeader header;
    Coins balance = 0;
    merkle::MerklePath path;
};

struct Approval {
    std::size_t validator = 0;
    Digest block_hash;
    crypto::Signature signature;
};

}  // namespace vulcan::chain
