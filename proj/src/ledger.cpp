#include "homeguard/ledger.hpp"

#include <openssl/evp.h>

#include <stdexcept>
#include <utility>

#include "homeguard/util.hpp"
#include "json.hpp"

namespace homeguard {

namespace {

const std::string kZeroHash(64, '0');

nlohmann::json body_to_json(const TxBody& body) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, value] : body) {
        if (const auto* s = std::get_if<std::string>(&value)) {
            j[key] = *s;
        } else {
            const auto& nested = std::get<BodyMap>(value);
            nlohmann::json inner = nlohmann::json::object();
            for (const auto& [k, v] : nested) inner[k] = v;
            j[key] = std::move(inner);
        }
    }
    return j;
}

// Canonical serialization: sorted keys, compact separators, leaf values are
// strings or integers only.
std::string canonical_block_text(std::uint64_t index, std::uint64_t timestamp,
                                 const std::string& prev_hash, std::uint64_t nonce,
                                 const Transaction& payload) {
    nlohmann::json j;
    j["index"] = index;
    j["timestamp"] = timestamp;
    j["prev_hash"] = prev_hash;
    j["nonce"] = nonce;
    j["payload"] = {{"kind", to_string(payload.kind)},
                    {"device_id", payload.device_id},
                    {"body", body_to_json(payload.body)}};
    return j.dump();  // nlohmann::json orders object keys lexicographically
}

std::uint64_t mining_attempt_bound(unsigned difficulty) {
    const unsigned bits = 4 * (difficulty + 2);  // 16^(difficulty+2)
    if (bits >= 64) return UINT64_MAX;
    return std::uint64_t{1} << bits;
}

Transaction genesis_payload() {
    return Transaction{TxKind::AdmissionDecision, "", {{"genesis", std::string("true")}}};
}

}  // namespace

const char* to_string(TxKind kind) {
    switch (kind) {
        case TxKind::AdmissionRequest: return "AdmissionRequest";
        case TxKind::AdmissionDecision: return "AdmissionDecision";
        case TxKind::RssiReport: return "RssiReport";
        case TxKind::PositionRecord: return "PositionRecord";
    }
    throw std::logic_error("unreachable TxKind");
}

TxKind tx_kind_from_string(const std::string& s) {
    if (s == "AdmissionRequest") return TxKind::AdmissionRequest;
    if (s == "AdmissionDecision") return TxKind::AdmissionDecision;
    if (s == "RssiReport") return TxKind::RssiReport;
    if (s == "PositionRecord") return TxKind::PositionRecord;
    throw std::invalid_argument("unknown transaction kind: \"" + s + "\"");
}

const char* to_string(ChainMode mode) {
    return mode == ChainMode::Private ? "private" : "public";
}

ChainMode chain_mode_from_string(const std::string& s) {
    if (s == "private") return ChainMode::Private;
    if (s == "public") return ChainMode::Public;
    throw std::invalid_argument("unknown chain mode: \"" + s + "\" (want \"private\" or \"public\")");
}

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256: EVP_Digest failed");
    static const char hexdig[] = "0123456789abcdef";
    std::string out(2 * len, '0');
    for (unsigned i = 0; i < len; ++i) {
        out[2 * i] = hexdig[md[i] >> 4];
        out[2 * i + 1] = hexdig[md[i] & 0xf];
    }
    return out;
}

std::string block_digest(std::uint64_t index, std::uint64_t timestamp,
                         const std::string& prev_hash, std::uint64_t nonce,
                         const Transaction& payload) {
    return sha256_hex(canonical_block_text(index, timestamp, prev_hash, nonce, payload));
}

bool meets_difficulty(const std::string& hash_hex, unsigned difficulty) {
    if (difficulty > hash_hex.size()) return false;
    for (unsigned i = 0; i < difficulty; ++i)
        if (hash_hex[i] != '0') return false;
    return true;
}

bool verify_block(const Block& block, unsigned difficulty) {
    if (block.hash != block_digest(block.index, block.timestamp, block.prev_hash,
                                   block.nonce, block.payload))
        return false;
    return meets_difficulty(block.hash, difficulty);
}

Chain::Chain(ChainConfig config) : config_(config) {
    if (config_.difficulty > kMaxDifficulty)
        throw std::invalid_argument("chain difficulty " + std::to_string(config_.difficulty) +
                                    " out of range (max " + std::to_string(kMaxDifficulty) + ")");
    append_impl(genesis_payload(), std::nullopt, false);  // genesis is never mined
}

Chain Chain::from_blocks(ChainConfig config, std::vector<Block> blocks) {
    if (config.difficulty > kMaxDifficulty)
        throw std::invalid_argument("chain difficulty out of range");
    Chain chain{ChainConfig{config.mode, 0}};
    chain.config_ = config;
    chain.blocks_ = std::move(blocks);
    chain.next_timestamp_ = chain.blocks_.empty() ? 0 : chain.blocks_.back().timestamp + 1;
    return chain;
}

Block Chain::append_private(Transaction payload) {
    if (config_.mode != ChainMode::Private)
        throw std::logic_error("append_private requires a Private chain");
    return append_impl(std::move(payload), std::nullopt, true);
}

Block Chain::mine_block(Transaction payload, unsigned difficulty) {
    if (config_.mode != ChainMode::Public)
        throw std::logic_error("mine_block requires a Public chain");
    if (difficulty > kMaxDifficulty)
        throw std::invalid_argument("mining difficulty out of range");
    if (blocks_.empty())
        throw std::logic_error("mine_block on an empty chain");
    return append_impl(std::move(payload), difficulty, true);
}

Block Chain::submit(Transaction payload) {
    if (config_.mode == ChainMode::Private) return append_private(std::move(payload));
    return mine_block(std::move(payload), config_.difficulty);
}

void Chain::register_contract(TxKind trigger, ContractHandler handler) {
    if (contracts_.count(trigger))
        throw std::logic_error(std::string("contract already registered for kind ") +
                               to_string(trigger));
    contracts_.emplace(trigger, std::move(handler));
}

Block Chain::append_impl(Transaction payload, std::optional<unsigned> difficulty,
                         bool run_contracts) {
    Block b;
    b.index = blocks_.empty() ? 0 : blocks_.back().index + 1;
    b.timestamp = next_timestamp_++;
    b.prev_hash = blocks_.empty() ? kZeroHash : blocks_.back().hash;
    b.nonce = 0;
    b.payload = std::move(payload);

    if (difficulty && *difficulty > 0) {
        const std::uint64_t max_attempts = mining_attempt_bound(*difficulty);
        std::uint64_t attempts = 0;
        for (;;) {
            b.hash = block_digest(b.index, b.timestamp, b.prev_hash, b.nonce, b.payload);
            ++attempts;
            if (meets_difficulty(b.hash, *difficulty)) break;
            if (attempts >= max_attempts)
                throw std::runtime_error("mining aborted after " + std::to_string(attempts) +
                                         " attempts at difficulty " + std::to_string(*difficulty));
            ++b.nonce;
        }
    } else {
        b.hash = block_digest(b.index, b.timestamp, b.prev_hash, b.nonce, b.payload);
    }

    blocks_.push_back(std::move(b));
    const std::size_t pos = blocks_.size() - 1;

    if (run_contracts) {
        auto it = contracts_.find(blocks_[pos].payload.kind);
        if (it != contracts_.end()) {
            // Copy: the handler's follow-up append may reallocate blocks_.
            const Transaction trigger = blocks_[pos].payload;
            if (auto follow = it->second(trigger))
                append_impl(std::move(*follow), difficulty, false);
        }
    }
    return blocks_[pos];
}

VerifyResult Chain::verify() const {
    if (blocks_.empty()) return {false, 0};
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const Block& b = blocks_[i];
        bool ok = b.index == i;
        if (ok) ok = (i == 0) ? b.prev_hash == kZeroHash : b.prev_hash == blocks_[i - 1].hash;
        if (ok)
            ok = b.hash ==
                 block_digest(b.index, b.timestamp, b.prev_hash, b.nonce, b.payload);
        if (ok && config_.mode == ChainMode::Public && i > 0)
            ok = meets_difficulty(b.hash, config_.difficulty);
        if (!ok) return {false, i};
    }
    return {true, std::nullopt};
}

std::string dump_chain(const Chain& chain) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Block& b : chain.blocks()) {
        nlohmann::ordered_json jb;
        jb["index"] = b.index;
        jb["timestamp"] = b.timestamp;
        jb["prev_hash"] = b.prev_hash;
        jb["nonce"] = b.nonce;
        nlohmann::ordered_json payload;
        payload["kind"] = to_string(b.payload.kind);
        payload["device_id"] = b.payload.device_id;
        nlohmann::ordered_json body = nlohmann::ordered_json::object();
        for (const auto& [key, value] : b.payload.body) {
            if (const auto* s = std::get_if<std::string>(&value)) {
                body[key] = *s;
            } else {
                nlohmann::ordered_json inner = nlohmann::ordered_json::object();
                for (const auto& [k, v] : std::get<BodyMap>(value)) inner[k] = v;
                body[key] = std::move(inner);
            }
        }
        payload["body"] = std::move(body);
        jb["payload"] = std::move(payload);
        jb["hash"] = b.hash;
        arr.push_back(std::move(jb));
    }
    return arr.dump();
}

namespace {

[[noreturn]] void load_fail(std::size_t i, const std::string& what) {
    throw std::runtime_error("chain dump: blocks[" + std::to_string(i) + "]: " + what);
}

std::uint64_t require_uint(const nlohmann::json& obj, const char* key, std::size_t i) {
    if (!obj.contains(key)) load_fail(i, std::string("missing key \"") + key + "\"");
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0))
        load_fail(i, std::string("\"") + key + "\" must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string require_hash(const nlohmann::json& obj, const char* key, std::size_t i) {
    if (!obj.contains(key)) load_fail(i, std::string("missing key \"") + key + "\"");
    const auto& v = obj.at(key);
    if (!v.is_string()) load_fail(i, std::string("\"") + key + "\" must be a string");
    auto s = v.get<std::string>();
    if (!is_hex64(s))
        load_fail(i, std::string("\"") + key + "\" must be 64 lowercase hex characters");
    return s;
}

TxBody parse_body(const nlohmann::json& j, std::size_t i) {
    if (!j.is_object()) load_fail(i, "payload body must be an object");
    TxBody body;
    for (const auto& [key, value] : j.items()) {
        if (value.is_string()) {
            body[key] = value.get<std::string>();
        } else if (value.is_object()) {
            BodyMap inner;
            for (const auto& [k, v] : value.items()) {
                if (!v.is_string())
                    load_fail(i, "body value at \"" + key + "." + k + "\" must be a string");
                inner[k] = v.get<std::string>();
            }
            body[key] = std::move(inner);
        } else {
            load_fail(i, "body value at \"" + key + "\" must be a string or object of strings");
        }
    }
    return body;
}

}  // namespace

Chain load_chain(const std::string& json_text, ChainConfig config) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("chain dump: ") + e.what());
    }
    if (!root.is_array()) throw std::runtime_error("chain dump: top level must be a JSON array");

    static const std::set<std::string> kBlockKeys = {"index", "timestamp", "prev_hash",
                                                     "nonce", "payload", "hash"};
    static const std::set<std::string> kPayloadKeys = {"kind", "device_id", "body"};

    std::vector<Block> blocks;
    blocks.reserve(root.size());
    for (std::size_t i = 0; i < root.size(); ++i) {
        const auto& jb = root[i];
        if (!jb.is_object()) load_fail(i, "must be an object");
        for (const auto& [key, _] : jb.items())
            if (!kBlockKeys.count(key)) load_fail(i, "unknown key \"" + key + "\"");

        Block b;
        b.index = require_uint(jb, "index", i);
        b.timestamp = require_uint(jb, "timestamp", i);
        b.prev_hash = require_hash(jb, "prev_hash", i);
        b.nonce = require_uint(jb, "nonce", i);
        b.hash = require_hash(jb, "hash", i);

        if (!jb.contains("payload")) load_fail(i, "missing key \"payload\"");
        const auto& jp = jb.at("payload");
        if (!jp.is_object()) load_fail(i, "payload must be an object");
        for (const auto& [key, _] : jp.items())
            if (!kPayloadKeys.count(key)) load_fail(i, "unknown payload key \"" + key + "\"");
        if (!jp.contains("kind") || !jp.at("kind").is_string())
            load_fail(i, "payload needs a string \"kind\"");
        if (!jp.contains("device_id") || !jp.at("device_id").is_string())
            load_fail(i, "payload needs a string \"device_id\"");
        if (!jp.contains("body")) load_fail(i, "payload needs a \"body\"");
        try {
            b.payload.kind = tx_kind_from_string(jp.at("kind").get<std::string>());
        } catch (const std::invalid_argument& e) {
            load_fail(i, e.what());
        }
        b.payload.device_id = jp.at("device_id").get<std::string>();
        b.payload.body = parse_body(jp.at("body"), i);
        blocks.push_back(std::move(b));
    }
    return Chain::from_blocks(config, std::move(blocks));
}

}  // namespace homeguard
