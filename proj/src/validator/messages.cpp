// Copyright 2026 The Vulcan Authors
// SPDX-License-Identifier: Apache-2.0

#include "vulcan/validator/messages.hpp"

#include "vulcan/common/codec.hpp"
#include "vulcan/crypto/hash.hpp"

namespace vulcan::validator {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void write_block(ByteWriter& w, const chain::Block& b) {
    w.raw(b.header.encode());
    w.u32(static_cast<std::uint32_t>(b.txs.size()));
    for (const auto& tx : b.txs) w.var(tx.encode());
    w.u32(static_cast<std::uint32_t>(b.accounts.size()));
    for (const auto& [id, coins] : b.accounts) w.var(id.bytes).u64(coins);
}

}  // namespace

std::string message_kind(const Message& m) {
    return std::visit(Overloaded{
                          [](const TransferFunds&) { return std::string("transferFunds"); },
                          [](const TxRequest&) { return std::string("txRequest"); },
                          [](const TxReply& r) { return std::string(r.accepted ? "txAck" : "txNotAck"); },
                          [](const ProposedBlock&) { return std::string("proposedBlock"); },
                          [](const BlockVote& v) {
                              return std::string(v.approval ? "blockApproved" : "blockNotApproved");
                          },
                          [](const CommitEcho&) { return std::string("commit"); },
                          [](const EpochRestart&) { return std::string("epochRestart"); },
                          [](const LeaderVote&) { return std::string("voteAgainstLeader"); },
                          [](const Receipt&) { return std::string("receipt"); },
                      },
                      m);
}

Bytes encode_message(const Message& m) {
    ByteWriter w;
    w.var(message_kind(m));
    std::visit(Overloaded{
                   [&](const TransferFunds& x) { w.var(x.tx.encode()); },
                   [&](const TxRequest& x) { w.var(x.tx.encode()); },
                   [&](const TxReply& x) { w.digest(x.tx_hash).u8(x.accepted ? 1 : 0).var(x.reason); },
                   [&](const ProposedBlock& x) {
                       w.u64(x.epoch).u32(x.round);
                       write_block(w, x.block);
                   },
                   [&](const BlockVote& x) {
                       w.u64(x.epoch).u32(x.round).digest(x.block_hash).u8(x.approval ? 1 : 0);
                       if (x.approval) {
                           w.u64(x.approval->validator).digest(x.approval->block_hash).var(x.approval->signature.bytes);
                       }
                   },
                   [&](const CommitEcho& x) { w.u64(x.epoch).raw(x.cp.encode()); },
                   [&](const EpochRestart& x) { w.u64(x.epoch).u32(x.round); },
                   [&](const LeaderVote& x) {
                       w.u64(x.epoch).u64(x.slot).var(x.leader.bytes).u64(x.voter).var(x.signature.bytes);
                   },
                   [&](const Receipt& x) {
                       w.u64(x.epoch).var(x.tx.encode()).var(x.leader.bytes).var(x.signature.bytes);
                   },
               },
               m);
    return std::move(w).bytes();
}

Digest message_digest(const Message& m) { return crypto::sha256(encode_message(m)); }

}  // namespace vulcan::validator
