#ifndef WIRESIM_PIPELINE_HPP
#define WIRESIM_PIPELINE_HPP

// Orchestration: configuration, depo ingestion, the end-to-end simulation
// with per-depo or batched dispatch, stage timing and the benchmark
// harness.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "wiresim/core.hpp"
#include "wiresim/rasterize.hpp"
#include "wiresim/scatter.hpp"
#include "wiresim/spectral.hpp"

namespace wiresim {

enum class DispatchMode { per_depo, batched };

struct RngConfig {
    RngMode mode = RngMode::substream;
    std::uint64_t seed = 12345;
    std::size_t slice_len = 1024;  // pool draws reserved per depo
};

struct AdcConfig {
    double scale = 1.0;
    double offset = 2048.0;
    int bits = 12;
};

struct SimConfig {
    GridSpec grid;
    DriftParams drift;
    ResponseParams response;
    NoiseModel noise;
    double n_sigma = 3.0;
    RngConfig rng;
    DispatchMode dispatch = DispatchMode::batched;
    std::size_t batch_size = 4096;
    int workers = 1;
    AdcConfig adc;
    ScatterStrategy scatter = ScatterStrategy::banded;

    void validate() const;
};

SimConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SimConfig& config);
SimConfig load_config(const std::filesystem::path& path);

/// Per-stage wall-clock report. The 2D-sampling and fluctuation entries are
/// summed over tasks; under parallelism they may exceed or overlap the
/// enclosing rasterization wall time.
struct TimingReport {
    double rasterization_total_s = 0.0;
    double sampling_2d_s = 0.0;
    double fluctuation_s = 0.0;
    double scatter_add_s = 0.0;
    double ft_s = 0.0;
    double total_s = 0.0;
    std::string rng_mode;
    std::string dispatch_mode;
    int workers = 1;
    std::int64_t clipped_patch_count = 0;
};

nlohmann::json timing_to_json(const TimingReport& report);

std::string to_string(RngMode mode);
std::string to_string(DispatchMode mode);
RngMode rng_mode_from_string(const std::string& s);
DispatchMode dispatch_mode_from_string(const std::string& s);

/// CSV with header `id,t_us,x_mm,q,sigma_t_us,sigma_x_mm`; ids must equal
/// the 0-based row index. Parse errors name the offending line.
std::vector<Depo> load_depos(const std::filesystem::path& path);

struct DepoGenRanges {
    std::int64_t q_min = 1000, q_max = 10000;
    double sigma_t_min = 0.5, sigma_t_max = 1.5;  // us
    double sigma_x_min = 2.5, sigma_x_max = 7.5;  // mm
};

/// Synthetic depo file: n depos placed uniformly inside the unpadded grid
/// region, deterministic for a given seed.
void gen_depos(std::size_t n, std::uint64_t seed, const GridSpec& spec, const DepoGenRanges& ranges,
               const std::filesystem::path& path);

struct SimResult {
    Matrix<std::int32_t> adc;
    TimingReport timing;
    ChargeGrid charge;          // pre-convolution grid, kept for diagnostics
    std::int64_t clipped_charge = 0;  // electrons of depos whose footprint left the grid entirely
};

/// drift (when enabled) -> rasterize -> scatter-add -> convolve -> noise ->
/// digitize. Pool and substream modes give bitwise-identical grids for any
/// worker count and either dispatch mode.
SimResult run_simulation(const SimConfig& config, const std::vector<Depo>& depos);

struct BenchVariant {
    RngMode rng = RngMode::substream;
    DispatchMode dispatch = DispatchMode::batched;
    int workers = 1;
};

/// Runs each variant `repeats` times; per-stage mean/min/max plus the raw
/// TimingReport records.
nlohmann::json bench(const SimConfig& config, const std::vector<Depo>& depos,
                     const std::vector<BenchVariant>& variants, int repeats = 5);

}  // namespace wiresim

#endif
