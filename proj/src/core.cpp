#include "wiresim/core.hpp"

#include <cmath>

namespace wiresim {

namespace {

long floor_index(double coord, double origin, double spacing)
{
    return static_cast<long>(std::floor((coord - origin) / spacing));
}

// Half extent in bins covering n_sigma * sigma from the center bin.
// Ceil keeps the footprint symmetric about the center and never narrower
// than the requested coverage.
long half_extent(double n_sigma, double sigma, double spacing)
{
    if (sigma <= 0.0) return 0;
    return static_cast<long>(std::ceil(n_sigma * sigma / spacing));
}

}  // namespace

GridFootprint map_depo_to_grid(const Depo& depo, const GridSpec& spec, double n_sigma)
{
    spec.validate();
    if (n_sigma <= 0.0) throw std::invalid_argument("map_depo_to_grid: n_sigma must be > 0");

    GridFootprint fp;
    fp.center_wire = static_cast<long>(spec.pad_wires) + floor_index(depo.x, spec.origin_x, spec.pitch);
    fp.center_tick = static_cast<long>(spec.pad_ticks) + floor_index(depo.t, spec.origin_t, spec.tick);

    const long hw = half_extent(n_sigma, depo.sigma_x, spec.pitch);
    const long ht = half_extent(n_sigma, depo.sigma_t, spec.tick);
    fp.wire_lo = fp.center_wire - hw;
    fp.wire_hi = fp.center_wire + hw;
    fp.tick_lo = fp.center_tick - ht;
    fp.tick_hi = fp.center_tick + ht;
    return fp;
}

}  // namespace wiresim
