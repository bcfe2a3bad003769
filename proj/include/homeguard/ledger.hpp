#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace homeguard {

enum class TxKind { AdmissionRequest, AdmissionDecision, RssiReport, PositionRecord };

const char* to_string(TxKind kind);
TxKind tx_kind_from_string(const std::string& s);

// Transaction bodies are string-valued maps, optionally nested one level
// (e.g. {"rssi": {"a0": "-45.000000"}}). Numbers are rendered as fixed-point
// decimal strings before they enter a body, so the canonical serialization of
// a block survives dump/parse round trips byte for byte.
using BodyMap = std::map<std::string, std::string>;
using BodyValue = std::variant<std::string, BodyMap>;
using TxBody = std::map<std::string, BodyValue>;

struct Transaction {
    TxKind kind = TxKind::AdmissionRequest;
    std::string device_id;
    TxBody body;

    bool operator==(const Transaction&) const = default;
};

struct Block {
    std::uint64_t index = 0;
    std::uint64_t timestamp = 0;  // simulated clock ticks, not wall time
    std::string prev_hash;        // 64 lowercase hex chars
    std::uint64_t nonce = 0;
    Transaction payload;
    std::string hash;

    bool operator==(const Block&) const = default;
};

// Membership list of devices allowed through the private access layer.
struct TrustList {
    std::set<std::string> entries;

    bool contains(const std::string& device_id) const {
        return entries.count(device_id) != 0;
    }
};

enum class ChainMode { Private, Public };

const char* to_string(ChainMode mode);
ChainMode chain_mode_from_string(const std::string& s);

// Practical bound on proof-of-work difficulty (leading hex zeros).
inline constexpr unsigned kMaxDifficulty = 16;

struct ChainConfig {
    ChainMode mode = ChainMode::Private;
    unsigned difficulty = 0;  // Public mode only; ignored in Private mode
};

std::string sha256_hex(std::string_view data);

// Digest of the canonical serialization (sorted-key compact JSON) of the
// block field tuple. Lowercase hex.
std::string block_digest(std::uint64_t index, std::uint64_t timestamp,
                         const std::string& prev_hash, std::uint64_t nonce,
                         const Transaction& payload);

bool meets_difficulty(const std::string& hash_hex, unsigned difficulty);

// Recomputes the digest of a block and checks the leading-zero rule.
bool verify_block(const Block& block, unsigned difficulty = 0);

struct VerifyResult {
    bool ok = false;
    std::optional<std::uint64_t> first_bad_index;
};

// A contract may emit one follow-up transaction, appended right after the
// triggering block. Follow-ups do not re-trigger contracts.
using ContractHandler = std::function<std::optional<Transaction>(const Transaction&)>;

class Chain {
public:
    // Creates the chain with its genesis block (index 0, all-zero prev_hash,
    // constant payload). Throws std::invalid_argument when difficulty > 16.
    explicit Chain(ChainConfig config = {});

    // Adopts an externally supplied block list verbatim (e.g. a parsed dump).
    // No integrity checks are performed here; use verify().
    static Chain from_blocks(ChainConfig config, std::vector<Block> blocks);

    const ChainConfig& config() const { return config_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    std::size_t size() const { return blocks_.size(); }
    const Block& back() const { return blocks_.back(); }

    // Mutable access for tamper-injection in integrity tests and tooling.
    Block& mutable_block(std::size_t i) { return blocks_.at(i); }

    // Appends with nonce 0, no mining. Private mode only.
    Block append_private(Transaction payload);

    // Appends after a proof-of-work search: nonce starts at 0 and increments
    // until the digest has >= difficulty leading '0' hex chars. Public mode
    // only. Aborts after 16^(difficulty+2) attempts.
    Block mine_block(Transaction payload, unsigned difficulty);

    // Mode-dispatching append: Private appends directly, Public mines at the
    // configured difficulty.
    Block submit(Transaction payload);

    // At most one handler per transaction kind.
    void register_contract(TxKind trigger, ContractHandler handler);

    // True iff every stored hash matches its recomputed digest, prev_hash
    // links hold, indices run 0..n-1, and (Public mode) every non-genesis
    // block meets the configured difficulty.
    VerifyResult verify() const;

private:
    Block append_impl(Transaction payload, std::optional<unsigned> difficulty,
                      bool run_contracts);

    ChainConfig config_;
    std::vector<Block> blocks_;
    std::uint64_t next_timestamp_ = 0;
    std::map<TxKind, ContractHandler> contracts_;
};

// Chain dump format: JSON array of blocks, fields in the order
// index, timestamp, prev_hash, nonce, payload{kind, device_id, body}, hash.
std::string dump_chain(const Chain& chain);
Chain load_chain(const std::string& json_text, ChainConfig config = {});

}  // namespace homeguard
