#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ciblp/precoders.hpp"

namespace ciblp {

struct SimConfig {
    int k = 2;
    int n_t = 2;
    int n_block = 2;
    Modulation mod{ModKind::Psk, 4};
    std::vector<double> snr_db{10.0};
    int n_channels = 10;
    int n_blocks_per_channel = 1;
    std::vector<PrecoderKind> schemes{PrecoderKind::CiBlp, PrecoderKind::Zf};
    std::uint64_t seed = 1;
    double p0 = 1.0;
    double rzf_rho = 0.0;       // used when rzf_rho_track_snr is false
    bool rzf_rho_track_snr = true;  // rho = p0 / sigma^2 at the operating point
    int threads = 1;
    SolverConfig solver{};
};

// One (scheme, SNR) cell of a SER-vs-SNR sweep.
struct SerCell {
    PrecoderKind scheme;
    double snr_db = 0.0;
    long long symbols = 0;
    long long errors = 0;
    double ser = 0.0;
    double mean_solve_ms = 0.0;
    long long solves = 0;
    long long failures = 0;
};

struct BlockSweepCell {
    PrecoderKind scheme;
    int n_block = 0;
    double snr_db = 0.0;
    long long symbols = 0;
    long long errors = 0;
    double ser = 0.0;
};

struct TimingCell {
    int k = 0;
    int n_t = 0;
    int n_block = 0;
    PrecoderKind scheme;       // CiBlp or CiSlp
    double mean_solve_ms = 0.0;  // per block: one BLP solve vs the N SLP solves
    double std_solve_ms = 0.0;
    double mean_per_solve_ms = 0.0;  // CiSlp: mean over individual slot solves
};

// Deterministic substreams: every (seed, purpose, channel, block) tuple owns
// an independent generator, so results do not depend on thread scheduling.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t purpose,
                          std::uint64_t channel, std::uint64_t block = 0);

double gauss(std::mt19937_64& rng);   // N(0, 1)
cplx cgauss(std::mt19937_64& rng);    // CN(0, 1)

MatrixXcd gen_channel(int k, int n_t, std::mt19937_64& rng);

// Symbol indices (K x N) and the corresponding constellation points.
struct SymbolBlock {
    Eigen::MatrixXi idx;
    MatrixXcd S;
};
SymbolBlock draw_symbols(int k, int n, const Modulation& mod, std::mt19937_64& rng);

// Received-signal detection. gains holds the per-slot normalization the
// receiver divides by before slicing (genie-aided for QAM); PSK slicing is
// phase-only so the gain is ignored there. unit_noise is CN(0,1) per entry
// and is scaled by sqrt(sigma2), which keeps noise common across schemes
// and SNR points.
Eigen::MatrixXi transmit_detect(const MatrixXcd& H, const MatrixXcd& W,
                                const MatrixXcd& S, const Modulation& mod,
                                const VectorXd& gains, double sigma2,
                                const MatrixXcd& unit_noise);

std::vector<SerCell> run_ser_sweep(const SimConfig& config);
std::vector<BlockSweepCell> run_block_sweep(const SimConfig& config,
                                            const std::vector<int>& n_list,
                                            double snr_db);
std::vector<TimingCell> run_timing(const SimConfig& config,
                                   const std::vector<int>& n_list);

// 95% Wilson score interval for a binomial proportion.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};
Interval wilson_interval(long long errors, long long total, double z = 1.959963985);

std::uint64_t fnv1a_digest(const void* data, std::size_t bytes,
                           std::uint64_t h = 1469598103934665603ULL);

}  // namespace ciblp
