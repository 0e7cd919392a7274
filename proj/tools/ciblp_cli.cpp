#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "ciblp/report.hpp"
#include "ciblp/validate.hpp"

namespace fs = std::filesystem;
using namespace ciblp;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config) {
    auto* opt = cmd->add_option("--config", args.config_path, "experiment config file");
    if (needs_config) opt->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed_override, "seed override (u64)");
    cmd->add_option("--threads", args.threads, "worker threads for Monte Carlo trials")
        ->check(CLI::PositiveNumber);
}

RunConfig load(const CommonArgs& args, const std::vector<std::string>& required) {
    RunConfig cfg = load_config(args.config_path);
    require_keys(cfg, required);
    if (args.seed_override) cfg.sim.seed = *args.seed_override;
    cfg.sim.threads = args.threads;
    return cfg;
}

RunManifest start_manifest(const std::string& command, const RunConfig& cfg) {
    RunManifest m;
    m.command = command;
    m.version = version_string();
    m.seed = cfg.sim.seed;
    m.started_utc = utc_timestamp();
    m.config_echo = cfg.raw;
    m.config_echo["seed"] = std::to_string(cfg.sim.seed);
    return m;
}

int run_ser_sweep_cmd(const CommonArgs& args) {
    const RunConfig cfg =
        load(args, {"k", "n_t", "n_block", "modulation", "snr_db", "n_channels",
                    "schemes", "seed"});
    fs::create_directories(args.out_dir);
    RunManifest manifest = start_manifest("ser-sweep", cfg);

    const std::vector<SerCell> cells = run_ser_sweep(cfg.sim);
    const fs::path csv = fs::path(args.out_dir) / "ser_sweep.csv";
    const fs::path svg = fs::path(args.out_dir) / "ser_sweep.svg";
    write_text_file(csv.string(), ser_sweep_csv(cells));
    svg_from_ser_csv(csv.string(), svg.string());

    for (const SerCell& c : cells)
        manifest.failures_per_scheme[precoder_name(c.scheme)] = c.failures;
    manifest.outputs = {csv.filename().string(), svg.filename().string()};
    manifest.finished_utc = utc_timestamp();
    write_manifest(manifest, args.out_dir);
    std::cout << "wrote " << csv.string() << " (" << cells.size() << " rows)\n";
    return 0;
}

int run_block_sweep_cmd(const CommonArgs& args) {
    const RunConfig cfg =
        load(args, {"k", "n_t", "n_block_list", "modulation", "snr_db",
                    "n_channels", "schemes", "seed"});
    fs::create_directories(args.out_dir);
    RunManifest manifest = start_manifest("block-sweep", cfg);

    const std::vector<BlockSweepCell> cells =
        run_block_sweep(cfg.sim, cfg.n_block_list, cfg.sim.snr_db.front());
    const fs::path csv = fs::path(args.out_dir) / "block_sweep.csv";
    const fs::path svg = fs::path(args.out_dir) / "block_sweep.svg";
    write_text_file(csv.string(), block_sweep_csv(cells));
    svg_from_block_csv(csv.string(), svg.string());

    manifest.outputs = {csv.filename().string(), svg.filename().string()};
    manifest.finished_utc = utc_timestamp();
    write_manifest(manifest, args.out_dir);
    std::cout << "wrote " << csv.string() << " (" << cells.size() << " rows)\n";
    return 0;
}

int run_timing_cmd(const CommonArgs& args) {
    const RunConfig cfg =
        load(args, {"k", "n_t", "n_block_list", "modulation", "n_channels", "seed"});
    fs::create_directories(args.out_dir);
    RunManifest manifest = start_manifest("timing", cfg);

    const std::vector<TimingCell> cells = run_timing(cfg.sim, cfg.n_block_list);
    const fs::path csv = fs::path(args.out_dir) / "timing.csv";
    const fs::path svg = fs::path(args.out_dir) / "timing.svg";
    write_text_file(csv.string(), timing_csv(cells));
    svg_from_timing_csv(csv.string(), svg.string());

    manifest.outputs = {csv.filename().string(), svg.filename().string()};
    manifest.finished_utc = utc_timestamp();
    write_manifest(manifest, args.out_dir);
    std::cout << "wrote " << csv.string() << " (" << cells.size() << " rows)\n";
    return 0;
}

int run_validate_cmd(const CommonArgs& args) {
    std::uint64_t seed = 2024;
    if (args.seed_override) seed = *args.seed_override;
    const std::vector<CheckResult> results = run_validation(seed);
    bool all_ok = true;
    for (const CheckResult& r : results) {
        std::printf("%-34s %s  residual %.3e (threshold %.1e)%s%s\n", r.name.c_str(),
                    r.passed ? "PASS" : "FAIL", r.residual, r.threshold,
                    r.detail.empty() ? "" : "  ", r.detail.c_str());
        all_ok = all_ok && r.passed;
    }
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"constructive-interference block-level precoding experiments"};
    app.require_subcommand(1);

    CommonArgs ser_args, block_args, timing_args, validate_args;
    CLI::App* ser = app.add_subcommand("ser-sweep", "SER vs SNR sweep");
    add_common(ser, ser_args, true);
    CLI::App* blk = app.add_subcommand("block-sweep", "SER vs block length sweep");
    add_common(blk, block_args, true);
    CLI::App* tim = app.add_subcommand("timing", "QP solve time vs block length");
    add_common(tim, timing_args, true);
    CLI::App* val = app.add_subcommand("validate", "run the invariant battery");
    add_common(val, validate_args, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (ser->parsed()) return run_ser_sweep_cmd(ser_args);
        if (blk->parsed()) return run_block_sweep_cmd(block_args);
        if (tim->parsed()) return run_timing_cmd(timing_args);
        if (val->parsed()) return run_validate_cmd(validate_args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const SolverFailureRate& e) {
        std::cerr << "solver failure rate: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
