// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vulcan/simnet/rng.hpp"
#include "vulcan/simnet/scenario.hpp"
#include "vulcan/validator/validator.hpp"

namespace vulcan::simnet {

/// What a client can see when it acts.
struct ClientView {
    const contract::Contract* contract = nullptr;
    const validator::Board* board = nullptr;
    Tick now = 0;
    /// The client's own mainchain balance.
    Coins mainchain = 0;
    Coins wager = 0;
    std::size_t n = 1;
};

struct ClientOutbox {
    /// (validator slot, message)
    std::vector<std::pair<std::size_t, validator::Message>> sends;
    std::vector<validator::Submit> submits;
    /// Coins a DepositCall moves into the frozen pot.
    Coins deposit = 0;
    /// Pairs of conflicting transfers sent by a double spender.
    std::size_t double_spends = 0;
};

/// A sidechain user: transfers on its turns, audits each committed checkpoint while
/// online, keeps the leader's receipts as evidence, and exits when the contract halts.
class Client {
  public:
    Client(ClientSpec spec, const crypto::SignatureScheme& scheme, crypto::KeyPair keys);

    [[nodiscard]] const std::string& id() const { return spec_.id; }
    [[nodiscard]] const crypto::PublicKey& public_key() const { return keys_.public_key; }
    [[nodiscard]] const ClientSpec& spec() const { return spec_; }
    [[nodiscard]] bool online() const { return spec_.behavior != ClientBehavior::Offline; }
    [[nodiscard]] bool joined() const { return joined_; }
    [[nodiscard]] bool exited() const { return exited_; }

    /// The initial deposit.
    ClientOutbox genesis() const;
    /// A workload turn: maybe one transfer (two conflicting ones for a double spender).
    ClientOutbox on_turn(const ClientView& v, Rng& rng, const Workload& w, const std::vector<crypto::PublicKey>& peers);
    ClientOutbox on_message(const ClientView& v, const validator::Message& m);
    /// Notices are broadcast; the client reacts to its own and to the global ones.
    ClientOutbox on_notice(const ClientView& v, const contract::Notice& n, Rng& rng, const Workload& w);

    /// Merkle siblings in every proof this client submitted.
    [[nodiscard]] const std::vector<std::size_t>& proof_sizes() const { return proof_sizes_; }

  private:
    /// Balance in the last finalized block (0 before the first); nullopt if the board
    /// does not serve that block.
    [[nodiscard]] std::optional<Coins> finalized_balance(const ClientView& v) const;
    /// What the pending block must credit this client: last finalized balance, the
    /// contract's records and the transfers receipted by the pending leader.
    [[nodiscard]] std::optional<std::int64_t> expected_balance(const ClientView& v) const;
    void audit_pending(const ClientView& v, Rng& rng, const Workload& w, ClientOutbox& out);
    void request_exit(const ClientView& v, ClientOutbox& out);
    void open_interactive_exit(const ClientView& v, ClientOutbox& out);

    ClientSpec spec_;
    const crypto::SignatureScheme* scheme_;
    crypto::KeyPair keys_;
    bool joined_ = false;
    bool exited_ = false;
    bool exit_requested_ = false;
    bool session_requested_ = false;
    Coins sent_this_epoch_ = 0;
    /// (epoch, leader) -> receipted transfers touching this client.
    std::map<std::pair<Epoch, crypto::PublicKey>, std::map<Digest, contract::CoSignedTx>> receipts_;
    std::vector<std::size_t> proof_sizes_;
};

}  // namespace vulcan::simnet
