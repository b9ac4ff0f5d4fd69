#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace xppn {

struct BenchRow {
    int size = 0, radii = 0, mode = 0;
    std::uint64_t seed = 0;
    double heur_cost = 0.0, final_cost = 0.0, final_gap_pct = 0.0;
    double exact_s = 0.0, heur_s = 0.0;
    int cuts = 0;
    std::string status;
};

struct BenchConfig {
    std::vector<int> sizes;
    std::vector<int> radii;
    std::vector<int> modes;
    int seeds_per_cell = 5;
    std::uint64_t seed_base = 1; // seeds run seed_base .. seed_base + seeds_per_cell - 1
    double eps = -1.0;           // forwarded to the exact solver
    double time_limit_s = 7200.0;
    int workers = 0; // 0: XPPN_THREADS env var, else hardware concurrency
};

struct BenchOutput {
    std::vector<BenchRow> rows; // per-run rows, grid order
    std::string csv;            // rows plus per-cell average lines
    std::string profile_csv;    // cumulative solved-within-t counts, log grid
};

// Runs the full (size, radii, mode, seed) grid through the heuristic and the
// exact solver. Cells run in a worker pool; failures become rows with an
// error status instead of aborting the grid.
BenchOutput run_bench(const BenchConfig& cfg);

} // namespace xppn
