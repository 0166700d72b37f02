#ifndef WIRESIM_SCATTER_HPP
#define WIRESIM_SCATTER_HPP

// Patch accumulation onto the charge grid. Integer addition is associative
// and commutative, so every strategy below is bitwise identical to the
// serial loop for any worker count and scheduling.

#include <cstdint>
#include <string>
#include <vector>

#include "wiresim/core.hpp"

namespace wiresim {

enum class ScatterStrategy {
    banded,  // wires partitioned into contiguous bands, one owner per band
    atomic   // patches distributed over workers, atomic adds per cell
};

/// Serial accumulation of one patch. Bounds violations are a contract
/// breach upstream (rasterization clips) and throw.
void scatter_add(ChargeGrid& grid, const CountPatch& patch);

void scatter_add_parallel(ChargeGrid& grid, const std::vector<CountPatch>& patches, int n_workers,
                          ScatterStrategy strategy = ScatterStrategy::banded);

struct ScalingRow {
    int workers = 0;
    double time_s = 0.0;
    double speedup = 0.0;  // relative to the 1-worker row
};

/// Times scatter_add_parallel at each worker count and checks every result
/// against the serial grid. Speedups are reported, not asserted; they are
/// machine facts.
std::vector<ScalingRow> scatter_scaling_report(const GridSpec& spec,
                                               const std::vector<CountPatch>& patches,
                                               const std::vector<int>& worker_counts,
                                               ScatterStrategy strategy = ScatterStrategy::banded);

/// CSV rows "workers,time_s,speedup" with header.
std::string scaling_report_csv(const std::vector<ScalingRow>& rows);

}  // namespace wiresim

#endif
