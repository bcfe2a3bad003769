#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "homeguard/config.hpp"

namespace homeguard {

// Subcommand bodies for the CLI binary. Each returns a process exit code:
// 0 for full success, nonzero otherwise, with diagnostics written to err.
// An empty output path skips that artifact.

int cmd_simulate_rssi(const Config& config, const std::string& out_csv,
                      const std::string& out_json, std::ostream& out, std::ostream& err);

int cmd_bench_chain(const Config& config, const std::string& out_json, std::ostream& out,
                    std::ostream& err);

int cmd_run_access(const Config& config, const std::string& requests_path,
                   const std::string& out_chain_json, std::ostream& out, std::ostream& err);

// Verifies a chain dump. Without a chain config only structure and hashes are
// checked; pass one to also enforce proof-of-work at its difficulty.
int cmd_verify_chain(const std::string& chain_path, std::ostream& out, std::ostream& err,
                     const std::optional<ChainConfig>& chain_config = std::nullopt);

}  // namespace homeguard
