#include "ciblp/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>

namespace ciblp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) {
    // (0, 1]; never 0 so log() is safe
    return (static_cast<double>(rng() >> 11) + 1.0) * (1.0 / 9007199254740992.0);
}

}  // namespace

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t purpose,
                          std::uint64_t channel, std::uint64_t block) {
    std::uint64_t h = splitmix(seed ^ 0x243f6a8885a308d3ULL);
    h = splitmix(h ^ purpose);
    h = splitmix(h ^ channel);
    h = splitmix(h ^ block);
    return std::mt19937_64(h);
}

double gauss(std::mt19937_64& rng) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

cplx cgauss(std::mt19937_64& rng) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-std::log(u1));
    return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
}

MatrixXcd gen_channel(int k, int n_t, std::mt19937_64& rng) {
    MatrixXcd h(k, n_t);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < n_t; ++c) h(r, c) = cgauss(rng);
    return h;
}

SymbolBlock draw_symbols(int k, int n, const Modulation& mod, std::mt19937_64& rng) {
    SymbolBlock blockk;
    blockk.idx.resize(k, n);
    blockk.S.resize(k, n);
    const std::vector<cplx> pts = mod.points();
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < k; ++r) {
            const int i = static_cast<int>(rng() % static_cast<std::uint64_t>(mod.order));
            blockk.idx(r, c) = i;
            blockk.S(r, c) = pts[static_cast<size_t>(i)];
        }
    }
    return blockk;
}

Eigen::MatrixXi transmit_detect(const MatrixXcd& H, const MatrixXcd& W,
                                const MatrixXcd& S, const Modulation& mod,
                                const VectorXd& gains, double sigma2,
                                const MatrixXcd& unit_noise) {
    const Eigen::Index k = H.rows();
    const Eigen::Index n = S.cols();
    const double noise_amp = std::sqrt(sigma2);
    const MatrixXcd rx = H * (W * S);

    Eigen::MatrixXi detected(k, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const double gain = gains.size() == 1 ? gains(0) : gains(c);
        for (Eigen::Index r = 0; r < k; ++r) {
            cplx y = rx(r, c) + noise_amp * unit_noise(r, c);
            if (mod.kind == ModKind::Qam) y /= gain;
            detected(r, c) = mod.detect(y);
        }
    }
    return detected;
}

Interval wilson_interval(long long errors, long long total, double z) {
    if (total <= 0) return {0.0, 1.0};
    const double n = static_cast<double>(total);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::uint64_t fnv1a_digest(const void* data, std::size_t bytes, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

std::uint64_t trial_digest(const MatrixXcd& H, const MatrixXcd& S,
                           const MatrixXcd& Z) {
    std::uint64_t h = fnv1a_digest(H.data(), sizeof(cplx) * H.size());
    h = fnv1a_digest(S.data(), sizeof(cplx) * S.size(), h);
    return fnv1a_digest(Z.data(), sizeof(cplx) * Z.size(), h);
}

struct SchemeSolve {
    MatrixXcd W;
    VectorXd gains;  // per-slot receiver normalization
    double solve_ms = 0.0;
    long long solves = 0;
};

// Precode one (channel, block) trial for a scheme. sigma2 only matters for
// the SNR-tracking RZF load.
SchemeSolve precode_trial(PrecoderKind scheme, const BlockProblem& block,
                          const SimConfig& cfg, double sigma2) {
    SchemeSolve out;
    switch (scheme) {
        case PrecoderKind::CiBlp: {
            const PrecodeResult res = ci_blp(block, cfg.solver);
            out.W = res.W;
            out.gains = VectorXd::Constant(1, res.t_star);
            out.solve_ms = res.solve_seconds * 1e3;
            out.solves = 1;
            break;
        }
        case PrecoderKind::CiSlp: {
            // per-slot solve; transmits slot n with its own precoder, which
            // is equivalent to a per-slot W applied to that column only
            const int n = block.num_slots();
            out.W.resize(block.num_antennas(), block.num_users() * n);
            out.gains.resize(n);
            for (int s = 0; s < n; ++s) {
                const PrecodeResult res =
                    ci_slp(block.H, block.S.col(s), block.p0, block.mod, cfg.solver);
                out.W.middleCols(s * block.num_users(), block.num_users()) = res.W;
                out.gains(s) = res.t_star;
                out.solve_ms += res.solve_seconds * 1e3;
                ++out.solves;
            }
            break;
        }
        case PrecoderKind::Zf: {
            const auto t0 = std::chrono::steady_clock::now();
            const LinearPrecoder lp = zf(block);
            const auto t1 = std::chrono::steady_clock::now();
            out.W = lp.W;
            out.gains = VectorXd::Constant(1, 1.0 / lp.scale);
            out.solve_ms = std::chrono::duration<double>(t1 - t0).count() * 1e3;
            out.solves = 1;
            break;
        }
        case PrecoderKind::Rzf: {
            const double rho =
                cfg.rzf_rho_track_snr ? cfg.p0 / std::max(sigma2, 1e-300) : cfg.rzf_rho;
            const auto t0 = std::chrono::steady_clock::now();
            const LinearPrecoder lp = rzf(block, rho);
            const auto t1 = std::chrono::steady_clock::now();
            out.W = lp.W;
            out.gains = VectorXd::Constant(1, 1.0 / lp.scale);
            out.solve_ms = std::chrono::duration<double>(t1 - t0).count() * 1e3;
            out.solves = 1;
            break;
        }
    }
    return out;
}

Eigen::MatrixXi detect_with(const SchemeSolve& sv, const BlockProblem& block,
                            double sigma2, const MatrixXcd& unit_noise) {
    const int k = block.num_users();
    const int n = block.num_slots();
    if (sv.W.cols() == k)
        return transmit_detect(block.H, sv.W, block.S, block.mod, sv.gains, sigma2,
                               unit_noise);
    // per-slot precoders (CI-SLP): detect column by column
    Eigen::MatrixXi det(k, n);
    for (int s = 0; s < n; ++s) {
        det.col(s) = transmit_detect(block.H, sv.W.middleCols(s * k, k),
                                     block.S.col(s), block.mod,
                                     VectorXd::Constant(1, sv.gains(s)), sigma2,
                                     unit_noise.col(s));
    }
    return det;
}

struct ChannelAccum {
    // [scheme][snr] error/symbol counts, plus per-scheme timing

    std::vector<std::vector<long long>> errors;
    std::vector<std::vector<long long>> symbols;
    std::vector<double> solve_ms;
    std::vector<long long> solves;
    std::vector<long long> failures;
    std::vector<long long> attempts;
};

double snr_to_sigma2(double snr_db, double p0) {
    return p0 / std::pow(10.0, snr_db / 10.0);
}

ChannelAccum run_channel(const SimConfig& cfg, int channel) {
    const size_t ns = cfg.schemes.size();
    const size_t nq = cfg.snr_db.size();
    ChannelAccum acc;
    acc.errors.assign(ns, std::vector<long long>(nq, 0));
    acc.symbols.assign(ns, std::vector<long long>(nq, 0));
    acc.solve_ms.assign(ns, 0.0);
    acc.solves.assign(ns, 0);
    acc.failures.assign(ns, 0);
    acc.attempts.assign(ns, 0);

    std::mt19937_64 hrng = substream(cfg.seed, 1, channel);
    const MatrixXcd H = gen_channel(cfg.k, cfg.n_t, hrng);

    for (int b = 0; b < cfg.n_blocks_per_channel; ++b) {
        std::mt19937_64 srng = substream(cfg.seed, 2, channel, b);
        const SymbolBlock sym = draw_symbols(cfg.k, cfg.n_block, cfg.mod, srng);
        std::mt19937_64 nrng = substream(cfg.seed, 3, channel, b);
        MatrixXcd unit_noise(cfg.k, cfg.n_block);
        for (int c = 0; c < cfg.n_block; ++c)
            for (int r = 0; r < cfg.k; ++r) unit_noise(r, c) = cgauss(nrng);

        BlockProblem block;
        block.H = H;
        block.S = sym.S;
        block.p0 = cfg.p0;
        block.mod = cfg.mod;

        const std::uint64_t digest0 = trial_digest(H, sym.S, unit_noise);

        for (size_t si = 0; si < ns; ++si) {
            const PrecoderKind scheme = cfg.schemes[si];
            // common-random-numbers discipline: every scheme must consume
            // the identical trial data
            if (trial_digest(block.H, block.S, unit_noise) != digest0)
                throw CiError("common-random-numbers digest mismatch");

            const bool per_snr_precoder =
                scheme == PrecoderKind::Rzf && cfg.rzf_rho_track_snr;

            SchemeSolve sv;
            bool solved = false;
            if (!per_snr_precoder) {
                ++acc.attempts[si];
                try {
                    sv = precode_trial(scheme, block, cfg, snr_to_sigma2(cfg.snr_db[0], cfg.p0));
                    solved = true;
                    acc.solve_ms[si] += sv.solve_ms;
                    acc.solves[si] += sv.solves;
                } catch (const CiError&) {
                    ++acc.failures[si];
                }
            }

            for (size_t qi = 0; qi < nq; ++qi) {
                const double sigma2 = snr_to_sigma2(cfg.snr_db[qi], cfg.p0);
                if (per_snr_precoder) {
                    ++acc.attempts[si];
                    try {
                        sv = precode_trial(scheme, block, cfg, sigma2);
                        solved = true;
                        acc.solve_ms[si] += sv.solve_ms;
                        acc.solves[si] += sv.solves;
                    } catch (const CiError&) {
                        ++acc.failures[si];
                        solved = false;
                    }
                }
                if (!solved) continue;
                const Eigen::MatrixXi det = detect_with(sv, block, sigma2, unit_noise);
                acc.symbols[si][qi] += static_cast<long long>(cfg.k) * cfg.n_block;
                acc.errors[si][qi] +=
                    (det.array() != sym.idx.array()).count();
            }
        }
    }
    return acc;
}

void merge(ChannelAccum& into, const ChannelAccum& from) {
    for (size_t s = 0; s < into.errors.size(); ++s) {
        for (size_t q = 0; q < into.errors[s].size(); ++q) {
            into.errors[s][q] += from.errors[s][q];
            into.symbols[s][q] += from.symbols[s][q];
        }
        into.solve_ms[s] += from.solve_ms[s];
        into.solves[s] += from.solves[s];
        into.failures[s] += from.failures[s];
        into.attempts[s] += from.attempts[s];
    }
}

ChannelAccum run_all_channels(const SimConfig& cfg) {
    std::vector<ChannelAccum> per_channel(static_cast<size_t>(cfg.n_channels));
    const int threads = std::max(1, cfg.threads);
    if (threads == 1) {
        for (int c = 0; c < cfg.n_channels; ++c)
            per_channel[static_cast<size_t>(c)] = run_channel(cfg, c);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (int c = next.fetch_add(1); c < cfg.n_channels;
                     c = next.fetch_add(1))
                    per_channel[static_cast<size_t>(c)] = run_channel(cfg, c);
            });
        }
        for (auto& th : pool) th.join();
    }
    ChannelAccum total = per_channel.front();
    for (size_t c = 1; c < per_channel.size(); ++c) merge(total, per_channel[c]);
    return total;
}

void check_failures(const SimConfig& cfg, const ChannelAccum& acc) {
    for (size_t s = 0; s < cfg.schemes.size(); ++s) {
        if (acc.attempts[s] > 0 &&
            acc.failures[s] * 100 > acc.attempts[s]) {
            throw SolverFailureRate(precoder_name(cfg.schemes[s]) + " failed " +
                                    std::to_string(acc.failures[s]) + "/" +
                                    std::to_string(acc.attempts[s]) + " solves (>1%)");
        }
    }
}

}  // namespace

std::vector<SerCell> run_ser_sweep(const SimConfig& config) {
    if (config.snr_db.empty()) throw ConfigError("snr_db grid is empty");
    if (config.schemes.empty()) throw ConfigError("schemes list is empty");

    const ChannelAccum acc = run_all_channels(config);
    check_failures(config, acc);

    std::vector<SerCell> cells;
    for (size_t s = 0; s < config.schemes.size(); ++s) {
        for (size_t q = 0; q < config.snr_db.size(); ++q) {
            SerCell cell;
            cell.scheme = config.schemes[s];
            cell.snr_db = config.snr_db[q];
            cell.symbols = acc.symbols[s][q];
            cell.errors = acc.errors[s][q];
            cell.ser = cell.symbols > 0
                           ? static_cast<double>(cell.errors) / cell.symbols
                           : 0.0;
            cell.mean_solve_ms = acc.solves[s] > 0 ? acc.solve_ms[s] / acc.solves[s] : 0.0;
            cell.solves = acc.solves[s];
            cell.failures = acc.failures[s];
            cells.push_back(cell);
        }
    }

    // sanity: SER must not grow with SNR beyond Monte Carlo noise
    for (size_t s = 0; s < config.schemes.size(); ++s) {
        std::vector<size_t> order(config.snr_db.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            return config.snr_db[a] < config.snr_db[b];
        });
        for (size_t i = 0; i + 1 < order.size(); ++i) {
            const SerCell& lo = cells[s * config.snr_db.size() + order[i]];
            const SerCell& hi = cells[s * config.snr_db.size() + order[i + 1]];
            if (lo.symbols == 0 || hi.symbols == 0) continue;
            const double se_lo =
                std::sqrt(std::max(lo.ser * (1.0 - lo.ser), 1e-12) / lo.symbols);
            const double se_hi =
                std::sqrt(std::max(hi.ser * (1.0 - hi.ser), 1e-12) / hi.symbols);
            const double slack = 3.0 * std::sqrt(se_lo * se_lo + se_hi * se_hi);
            if (hi.ser > lo.ser + slack)
                throw CiError("SER not monotone in SNR for scheme " +
                              precoder_name(config.schemes[s]));
        }
    }
    return cells;
}

std::vector<BlockSweepCell> run_block_sweep(const SimConfig& config,
                                            const std::vector<int>& n_list,
                                            double snr_db) {
    if (n_list.empty()) throw ConfigError("n_block_list is empty");
    std::vector<BlockSweepCell> cells;
    for (int n : n_list) {
        SimConfig cfg = config;
        cfg.n_block = n;
        cfg.snr_db = {snr_db};
        const std::vector<SerCell> sweep = run_ser_sweep(cfg);
        for (const SerCell& c : sweep) {
            BlockSweepCell bc;
            bc.scheme = c.scheme;
            bc.n_block = n;
            bc.snr_db = snr_db;
            bc.symbols = c.symbols;
            bc.errors = c.errors;
            bc.ser = c.ser;
            cells.push_back(bc);
        }
    }
    return cells;
}

std::vector<TimingCell> run_timing(const SimConfig& config,
                                   const std::vector<int>& n_list) {
    if (n_list.empty()) throw ConfigError("n_block_list is empty");
    std::vector<TimingCell> cells;
    for (int n : n_list) {
        std::vector<double> blp_ms, slp_ms;
        double slp_per_solve_sum = 0.0;
        long long slp_solves = 0;
        for (int c = 0; c < config.n_channels; ++c) {
            std::mt19937_64 hrng = substream(config.seed, 1, c);
            const MatrixXcd H = gen_channel(config.k, config.n_t, hrng);
            std::mt19937_64 srng = substream(config.seed, 2, c);
            const SymbolBlock sym = draw_symbols(config.k, n, config.mod, srng);

            BlockProblem block;
            block.H = H;
            block.S = sym.S;
            block.p0 = config.p0;
            block.mod = config.mod;

            const PrecodeResult blp = ci_blp(block, config.solver);
            blp_ms.push_back(blp.solve_seconds * 1e3);

            double block_total = 0.0;
            for (int s = 0; s < n; ++s) {
                const PrecodeResult slp = ci_slp(H, sym.S.col(s), config.p0,
                                                 config.mod, config.solver);
                block_total += slp.solve_seconds * 1e3;
                slp_per_solve_sum += slp.solve_seconds * 1e3;
                ++slp_solves;
            }
            slp_ms.push_back(block_total);
        }
        auto stats = [](const std::vector<double>& xs) {
            double mean = 0.0;
            for (double x : xs) mean += x;
            mean /= static_cast<double>(xs.size());
            double var = 0.0;
            for (double x : xs) var += (x - mean) * (x - mean);
            var /= std::max<size_t>(1, xs.size() - 1);
            return std::pair<double, double>(mean, std::sqrt(var));
        };
        const auto [bm, bs] = stats(blp_ms);
        const auto [sm, ss] = stats(slp_ms);
        cells.push_back({config.k, config.n_t, n, PrecoderKind::CiBlp, bm, bs, bm});
        cells.push_back({config.k, config.n_t, n, PrecoderKind::CiSlp, sm, ss,
                         slp_per_solve_sum / std::max<long long>(1, slp_solves)});
    }
    return cells;
}

}  // namespace ciblp
