#ifndef WIRESIM_RASTERIZE_HPP
#define WIRESIM_RASTERIZE_HPP

// Per-depo work: drift/diffusion, bin-integrated 2D Gaussian sampling and
// binomial charge fluctuation. All functions here are pure per-depo, so a
// parallel map over depos is race-free.

#include <cstdint>
#include <vector>

#include "wiresim/core.hpp"
#include "wiresim/rng.hpp"

namespace wiresim {

struct DriftParams {
    double response_plane_x = 0.0;  // mm
    double drift_speed = 1.6;       // mm/us
    double diffusion_long = 0.0068; // mm^2/us, longitudinal
    double diffusion_tran = 0.0088; // mm^2/us, transverse
    bool enabled = false;           // pipeline applies drift only when set;
                                    // depo files are assumed pre-drifted otherwise
};

/// Transport a depo to the response plane: shift arrival time by the drift
/// time and widen both Gaussian widths by diffusion. The drift side is
/// x >= response_plane_x; a depo behind the plane is rejected.
Depo drift_depo(const Depo& depo, const DriftParams& params);

/// Wall-clock accumulator for the two rasterization stages. One instance
/// per worker; merged after the parallel region.
struct StageClock {
    double sampling_s = 0.0;
    double fluctuation_s = 0.0;
    std::int64_t clipped_patches = 0;
};

struct SampledPatch {
    ProbPatch patch;
    double captured_mass = 0.0;  // Gaussian mass inside the clipped footprint,
                                 // before renormalization
    bool clipped = false;        // footprint touched or crossed the padded-grid edge
};

/// Per-bin integrals of a unit Gaussian over n consecutive bins of width
/// `spacing` starting at `lo_edge`. sigma = 0 collapses to a delta: the bin
/// containing the center gets 1.
std::vector<double> gauss_bin_integrals(double center, double sigma, double lo_edge, double spacing,
                                        std::size_t n);

/// Bin-integrated separable 2D Gaussian over the depo's footprint, clipped
/// to the padded grid and renormalized to sum exactly 1. An empty patch
/// (footprint fully outside the grid) has captured_mass 0.
SampledPatch sample_patch(const Depo& depo, const GridSpec& spec, double n_sigma);

/// Multinomial split of q electrons over the patch via sequential
/// conditional binomials; the final bin takes the remainder, so the counts
/// sum to q exactly.
CountPatch fluctuate(const ProbPatch& patch, std::int64_t q, RandomSource& src);

/// Same sequential scheme with the per-bin draw replaced by the Gaussian
/// approximation (mean + sd * z, rounded and clamped). This is the
/// pre-factored path: the only randomness consumed is one ready-made normal
/// per bin, so the hot loop does no generator work. Conservation is still
/// exact.
CountPatch fluctuate_approx(const ProbPatch& patch, std::int64_t q, RandomSource& src);

enum class RngMode { inline_stream, pool, substream };

/// Sampling + fluctuation for one depo. In pool mode draws come from the
/// depo's pool slice (normals, approximate sampler); in substream mode from
/// a per-depo generator (exact sampler); inline mode threads one shared
/// generator through the call (exact sampler, serial pipelines only).
CountPatch rasterize_depo(const Depo& depo, const GridSpec& spec, double n_sigma, RngMode mode,
                          const RandomPool* pool, std::uint64_t seed, RngState* inline_state,
                          StageClock& clock);

}  // namespace wiresim

#endif
