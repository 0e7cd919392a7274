#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ciblp/sim.hpp"

namespace ciblp {

// Flat key=value experiment configuration ('#' starts a comment).
// Recognized keys: k, n_t, n_block, n_block_list, modulation, snr_db,
// n_channels, n_blocks, schemes, seed, rzf_rho, p0, solver_tol.
struct RunConfig {
    SimConfig sim;
    std::vector<int> n_block_list;
    std::map<std::string, std::string> raw;  // echoed into the run manifest
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Per-command required keys; throws ConfigError naming the missing key.
void require_keys(const RunConfig& cfg, const std::vector<std::string>& keys);

}  // namespace ciblp
