#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ciblp/sim.hpp"

namespace ciblp {

struct CheckResult {
    std::string name;
    bool passed = false;
    double residual = 0.0;   // worst residual observed
    double threshold = 0.0;
    std::string detail;
};

// Random instance generator shared by the invariant battery and tests:
// K in {1..4}, N_T in {K..6}, N in {K..8}, modulation cycling through
// QPSK / 8PSK / 16QAM.
BlockProblem random_instance(std::uint64_t seed, int index);

// The full battery: Proposition-1 identity, the hand-traced golden
// instance, KKT certification of CI-BLP solves, power activeness,
// projection correctness, PG/FW cross-agreement, and the N=1 reduction.
std::vector<CheckResult> run_validation(std::uint64_t seed = 2024,
                                        int prop1_instances = 200,
                                        int kkt_instances = 60,
                                        int projection_cases = 1000,
                                        int solver_cases = 100);

}  // namespace ciblp
