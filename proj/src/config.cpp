#include "ciblp/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ciblp {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse real value '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse integer '" + v + "'");
    }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) +
                                           ": empty key");
        cfg.raw[key] = val;
    }

    for (const auto& [key, val] : cfg.raw) {
        if (key == "k") {
            cfg.sim.k = static_cast<int>(parse_int(key, val));
        } else if (key == "n_t") {
            cfg.sim.n_t = static_cast<int>(parse_int(key, val));
        } else if (key == "n_block") {
            cfg.sim.n_block = static_cast<int>(parse_int(key, val));
        } else if (key == "n_block_list") {
            for (const std::string& item : split_list(val))
                cfg.n_block_list.push_back(static_cast<int>(parse_int(key, item)));
        } else if (key == "modulation") {
            try {
                cfg.sim.mod = Modulation::parse(val);
            } catch (const InvalidModulation& e) {
                throw ConfigError(std::string("config key 'modulation': ") + e.what());
            }
        } else if (key == "snr_db") {
            cfg.sim.snr_db.clear();
            for (const std::string& item : split_list(val))
                cfg.sim.snr_db.push_back(parse_real(key, item));
            if (cfg.sim.snr_db.empty())
                throw ConfigError("config key 'snr_db': empty list");
        } else if (key == "n_channels") {
            cfg.sim.n_channels = static_cast<int>(parse_int(key, val));
        } else if (key == "n_blocks") {
            cfg.sim.n_blocks_per_channel = static_cast<int>(parse_int(key, val));
        } else if (key == "schemes") {
            cfg.sim.schemes.clear();
            for (const std::string& item : split_list(val)) {
                try {
                    cfg.sim.schemes.push_back(parse_precoder(item));
                } catch (const ConfigError&) {
                    throw ConfigError("config key 'schemes': unknown scheme '" + item + "'");
                }
            }
            if (cfg.sim.schemes.empty())
                throw ConfigError("config key 'schemes': empty list");
        } else if (key == "seed") {
            cfg.sim.seed = static_cast<std::uint64_t>(parse_int(key, val));
        } else if (key == "p0") {
            cfg.sim.p0 = parse_real(key, val);
            if (!(cfg.sim.p0 > 0.0)) throw ConfigError("config key 'p0': must be > 0");
        } else if (key == "rzf_rho") {
            if (val == "snr") {
                cfg.sim.rzf_rho_track_snr = true;
            } else {
                cfg.sim.rzf_rho_track_snr = false;
                cfg.sim.rzf_rho = parse_real(key, val);
                if (!(cfg.sim.rzf_rho > 0.0))
                    throw ConfigError("config key 'rzf_rho': must be positive or 'snr'");
            }
        } else if (key == "solver_tol") {
            cfg.sim.solver.tol = parse_real(key, val);
            if (!(cfg.sim.solver.tol > 0.0))
                throw ConfigError("config key 'solver_tol': must be > 0");
        } else {
            throw ConfigError("config key '" + key + "' is not recognized");
        }
    }

    if (cfg.sim.k < 1) throw ConfigError("config key 'k': must be >= 1");
    if (cfg.sim.n_t < cfg.sim.k)
        throw ConfigError("config key 'n_t': model requires n_t >= k");
    if (cfg.sim.n_block < 1) throw ConfigError("config key 'n_block': must be >= 1");
    if (cfg.sim.n_channels < 1)
        throw ConfigError("config key 'n_channels': must be >= 1");
    if (cfg.sim.n_blocks_per_channel < 1)
        throw ConfigError("config key 'n_blocks': must be >= 1");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void require_keys(const RunConfig& cfg, const std::vector<std::string>& keys) {
    for (const std::string& key : keys)
        if (!cfg.raw.count(key))
            throw ConfigError("config is missing required key '" + key + "'");
}

}  // namespace ciblp
