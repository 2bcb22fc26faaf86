// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include "vulcan/chain/checkpoint.hpp"

#include <map>

#include "vulcan/common/codec.hpp"
#include "vulcan/common/error.hpp"

namespace vulcan::chain {

std::size_t quorum(std::size_t n) { return n / 2 + 1; }

Bytes approval_message(const Digest& block_hash) {
    return Bytes(block_hash.bytes.begin(), block_hash.bytes.end());
}

Approval make_approval(const crypto::SignatureScheme& scheme, std::size_t validator,
                       const crypto::SecretKey& sk, const Digest& block_hash) {
    return {validator, block_hash, scheme.sign(approval_message(block_hash), sk)};
}

Checkpoint make_checkpoint(const crypto::SignatureScheme& scheme, const Digest& block_hash,
                           std::span<const Approval> approvals,
                           std::span<const crypto::PublicKey> roster) {
    const Bytes msg = approval_message(block_hash);
    std::map<std::size_t, crypto::Signature> valid;
    for (const auto& a : approvals) {
        if (a.block_hash != block_hash || a.validator >= roster.size()) continue;
        if (valid.contains(a.validator)) continue;
        if (!scheme.verify(msg, a.signature, roster[a.validator])) continue;
        valid.emplace(a.validator, a.signature);
    }
    if (valid.size() < quorum(roster.size())) throw ChainError("insufficient approvals");

    std::set<std::size_t> signers;
    std::vector<crypto::PublicKey> keys;
    std::vector<crypto::Signature> sigs;
    for (const auto& [idx, sig] : valid) {
        signers.insert(idx);
        keys.push_back(roster[idx]);
        sigs.push_back(sig);
    }
    return {block_hash, scheme.combine_same(msg, keys, sigs), crypto::encode_signers(signers, roster.size())};
}

bool verify_checkpoint(const crypto::SignatureScheme& scheme, const Checkpoint& cp,
                       std::span<const crypto::PublicKey> roster) {
    if (cp.index.n != roster.size() || roster.size() > crypto::kMaxValidators) return false;
    std::set<std::size_t> signers;
    try {
        signers = crypto::decode_signers(cp.index);
    } catch (const Error&) {
        return false;
    }
    if (signers.size() < quorum(roster.size())) return false;
    std::vector<crypto::PublicKey> keys;
    keys.reserve(signers.size());
    for (auto j : signers) keys.push_back(roster[j]);
    return scheme.verify_same(approval_message(cp.block_hash), keys, cp.qc);
}

ProofOfPossession make_pop(const AccountId& account, const Block& block) {
    auto it = block.accounts.find(account);
    if (it == block.accounts.end()) throw ChainError("account not in block");
    return {block.header, it->second, block.trie.prove(account.bytes)};
}

bool verify_pop(const Checkpoint& live, const ProofOfPossession& pop, Coins claimed) {
    if (pop.header.hash() != live.block_hash) return false;
    if (pop.path.value != pop.balance || claimed > pop.balance) return false;
    return merkle::verify_path(pop.header.account_root, pop.path);
}

Bytes vote_out_message(Epoch epoch, std::size_t slot, const crypto::PublicKey& leader) {
    ByteWriter w;
    w.var("vulcan-vote-out").u64(epoch).u64(slot).var(leader.bytes);
    return std::move(w).bytes();
}

Bytes receipt_message(Epoch epoch, const Digest& tx_hash) {
    ByteWriter w;
    w.var("vulcan-receipt").u64(epoch).digest(tx_hash);
    return std::move(w).bytes();
}

}  // namespace vulcan::chain
