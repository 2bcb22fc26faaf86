// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include "vulcan/chain/types.hpp"

#include "vulcan/common/codec.hpp"
#include "vulcan/common/error.hpp"
#include "vulcan/crypto/hash.hpp"

namespace vulcan::chain {

std::string_view to_string(TxKind kind) {
    switch (kind) {
        case TxKind::Transfer: return "transfer";
        case TxKind::Deposit: return "deposit";
        case TxKind::Withdraw: return "withdraw";
        case TxKind::Exit: return "exit";
    }
    return "unknown";
}

Bytes Transaction::signing_bytes() const {
    ByteWriter w;
    w.var("vulcan-tx")
        .u8(static_cast<std::uint8_t>(kind))
        .var(sender.bytes)
        .var(receiver.bytes)
        .u64(amount)
        .u64(epoch_tag);
    return std::move(w).bytes();
}

Bytes Transaction::encode() const {
    ByteWriter w;
    w.raw(signing_bytes()).var(signature.bytes);
    return std::move(w).bytes();
}

Digest Transaction::hash() const { return crypto::sha256(encode()); }

Transaction make_transfer(const crypto::SignatureScheme& scheme, const crypto::KeyPair& sender,
                          const AccountId& receiver, Coins amount, Epoch epoch_tag) {
    Transaction tx;
    tx.kind = TxKind::Transfer;
    tx.sender = sender.public_key;
    tx.receiver = receiver;
    tx.amount = amount;
    tx.epoch_tag = epoch_tag;
    tx.signature = scheme.sign(tx.signing_bytes(), sender.secret_key);
    return tx;
}

Transaction make_adjustment(TxKind kind, const AccountId& client, Coins amount, Epoch recorded_in) {
    if (kind == TxKind::Transfer) throw ChainError("a transfer is not a balance-change record");
    Transaction tx;
    tx.kind = kind;
    if (kind == TxKind::Deposit) {
        tx.receiver = client;
    } else {
        tx.sender = client;
    }
    tx.amount = amount;
    tx.epoch_tag = recorded_in;
    return tx;
}

const AccountId& adjustment_account(const Transaction& tx) {
    return tx.kind == TxKind::Deposit ? tx.receiver : tx.sender;
}

Bytes BlockHeader::encode() const {
    ByteWriter w;
    w.var("vulcan-header")
        .u64(epoch)
        .digest(prev_block_hash)
        .digest(last_checkpoint)
        .digest(tx_root)
        .digest(account_root);
    return std::move(w).bytes();
}

Digest BlockHeader::hash() const { return crypto::sha256(encode()); }

merkle::AccountTrie build_trie(const Balances& balances) {
    merkle::AccountTrie trie;
    for (const auto& [id, coins] : balances) trie = trie.set(id.bytes, coins);
    return trie;
}

Bytes Checkpoint::encode() const {
    ByteWriter w;
    w.var("vulcan-checkpoint")
        .digest(block_hash)
        .var(qc.bytes)
        .u32(static_cast<std::uint32_t>(index.n))
        .u64(index.value);
    return std::move(w).bytes();
}

Digest Checkpoint::hash() const { return crypto::sha256(encode()); }

}  // namespace vulcan::chain
