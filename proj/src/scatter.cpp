#include "wiresim/scatter.hpp"

#include <atomic>
#include <chrono>
#include <sstream>
#include <stdexcept>

#include "wiresim/threading.hpp"

namespace wiresim {

namespace {

void check_bounds(const ChargeGrid& grid, const CountPatch& patch)
{
    if (patch.empty()) return;
    const long rows = static_cast<long>(grid.counts.rows);
    const long cols = static_cast<long>(grid.counts.cols);
    if (patch.wire_offset < 0 || patch.tick_offset < 0 ||
        patch.wire_offset + static_cast<long>(patch.n_w) > rows ||
        patch.tick_offset + static_cast<long>(patch.n_t) > cols)
        throw std::out_of_range("scatter_add: patch exceeds the padded grid (rasterization must clip)");
}

}  // namespace

void scatter_add(ChargeGrid& grid, const CountPatch& patch)
{
    check_bounds(grid, patch);
    for (std::size_t w = 0; w < patch.n_w; ++w) {
        std::int64_t* row = grid.counts.row_ptr(static_cast<std::size_t>(patch.wire_offset) + w) +
                            patch.tick_offset;
        const std::int64_t* src = patch.values.data() + w * patch.n_t;
        for (std::size_t t = 0; t < patch.n_t; ++t) row[t] += src[t];
    }
}

namespace {

// Every worker scans all patches but writes only the rows of its own wire
// band; a patch spanning a band boundary is split between the owners.
void scatter_banded(ChargeGrid& grid, const std::vector<CountPatch>& patches, int n_workers)
{
    const std::size_t rows = grid.counts.rows;
    parallel_for(rows, n_workers, [&](std::size_t band_lo, std::size_t band_hi, int) {
        for (const CountPatch& patch : patches) {
            if (patch.empty()) continue;
            const std::size_t plo = static_cast<std::size_t>(patch.wire_offset);
            const std::size_t phi = plo + patch.n_w;  // exclusive
            const std::size_t lo = std::max(band_lo, plo);
            const std::size_t hi = std::min(band_hi, phi);
            for (std::size_t r = lo; r < hi; ++r) {
                std::int64_t* dst = grid.counts.row_ptr(r) + patch.tick_offset;
                const std::int64_t* src = patch.values.data() + (r - plo) * patch.n_t;
                for (std::size_t t = 0; t < patch.n_t; ++t) dst[t] += src[t];
            }
        }
    });
}

void scatter_atomic(ChargeGrid& grid, const std::vector<CountPatch>& patches, int n_workers)
{
    parallel_tasks(patches.size(), n_workers, [&](std::size_t i, int) {
        const CountPatch& patch = patches[i];
        for (std::size_t w = 0; w < patch.n_w; ++w) {
            std::int64_t* row = grid.counts.row_ptr(static_cast<std::size_t>(patch.wire_offset) + w) +
                                patch.tick_offset;
            const std::int64_t* src = patch.values.data() + w * patch.n_t;
            for (std::size_t t = 0; t < patch.n_t; ++t)
                std::atomic_ref<std::int64_t>(row[t]).fetch_add(src[t], std::memory_order_relaxed);
        }
    });
}

}  // namespace

void scatter_add_parallel(ChargeGrid& grid, const std::vector<CountPatch>& patches, int n_workers,
                          ScatterStrategy strategy)
{
    for (const CountPatch& patch : patches) check_bounds(grid, patch);
    if (n_workers <= 1) {
        for (const CountPatch& patch : patches) scatter_add(grid, patch);
        return;
    }
    if (strategy == ScatterStrategy::banded)
        scatter_banded(grid, patches, n_workers);
    else
        scatter_atomic(grid, patches, n_workers);
}

std::vector<ScalingRow> scatter_scaling_report(const GridSpec& spec,
                                               const std::vector<CountPatch>& patches,
                                               const std::vector<int>& worker_counts,
                                               ScatterStrategy strategy)
{
    using clock = std::chrono::steady_clock;

    ChargeGrid reference(spec);
    for (const CountPatch& patch : patches) scatter_add(reference, patch);

    std::vector<ScalingRow> rows;
    for (int workers : worker_counts) {
        ChargeGrid grid(spec);
        const auto t0 = clock::now();
        scatter_add_parallel(grid, patches, workers, strategy);
        const double dt = std::chrono::duration<double>(clock::now() - t0).count();
        if (grid.counts != reference.counts)
            throw std::logic_error("scatter_scaling_report: parallel grid differs from serial at " +
                                   std::to_string(workers) + " workers");
        rows.push_back({workers, dt, 0.0});
    }
    // speedups relative to the 1-worker row (first row if none ran serially)
    double base_time = rows.empty() ? 0.0 : rows.front().time_s;
    for (const ScalingRow& row : rows)
        if (row.workers == 1) {
            base_time = row.time_s;
            break;
        }
    for (ScalingRow& row : rows) row.speedup = row.time_s > 0.0 ? base_time / row.time_s : 0.0;
    return rows;
}

std::string scaling_report_csv(const std::vector<ScalingRow>& rows)
{
    std::ostringstream os;
    os << "workers,time_s,speedup\n";
    for (const ScalingRow& row : rows) os << row.workers << ',' << row.time_s << ',' << row.speedup << '\n';
    return os.str();
}

}  // namespace wiresim
