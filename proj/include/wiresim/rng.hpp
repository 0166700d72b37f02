#ifndef WIRESIM_RNG_HPP
#define WIRESIM_RNG_HPP

// Deterministic random number generation. The generator is xoshiro256**
// seeded through splitmix64, so sequences are bit-reproducible across
// platforms and languages. Per-depo substreams and the pre-generated pool
// make parallel sampling independent of thread count and work order.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wiresim {

struct RngState {
    std::array<std::uint64_t, 4> s{};
};

std::uint64_t splitmix64_next(std::uint64_t& state);

/// State from iterating splitmix64 on the seed; never all-zero.
RngState seed_state(std::uint64_t seed);

/// xoshiro256** output function and state transition.
std::uint64_t next_u64(RngState& state);

/// Uniform in [0,1): top 53 bits of next_u64 scaled by 2^-53.
double uniform01(RngState& state);

/// Box-Muller transform. Requires u1 in (0,1], u2 in [0,1); u1 = 0 is
/// rejected (infinite radius) and the caller redraws.
std::pair<double, double> box_muller(double u1, double u2);

/// Independent stream for a work unit. Distinct stream ids give distinct,
/// effectively uncorrelated sequences for the same seed.
RngState substream(std::uint64_t seed, std::uint64_t stream_id);

/// Pre-generated random numbers, sliced per depo: depo id d owns elements
/// [d*slice_len, (d+1)*slice_len) of both arrays. Written once, then shared
/// read-only between threads.
struct RandomPool {
    std::uint64_t seed = 0;
    std::size_t n_depos = 0;
    std::size_t slice_len = 0;
    std::vector<double> normals;
    std::vector<double> uniforms;
};

RandomPool build_pool(std::uint64_t seed, std::size_t n_depos, std::size_t slice_len);

struct PoolExhausted : std::runtime_error {
    std::int64_t depo_id;
    explicit PoolExhausted(std::int64_t id, const std::string& what_arg)
        : std::runtime_error(what_arg), depo_id(id) {}
};

/// Uniform/normal draw interface shared by the inline, substream and pool
/// sampling modes.
class RandomSource {
  public:
    virtual ~RandomSource() = default;
    virtual double uniform() = 0;
    virtual double normal() = 0;
};

/// Draws from a live generator state (inline and substream modes).
/// Normals come in Box-Muller pairs; u1 is mapped to (0,1] via 1-u so a
/// pair always consumes exactly two uniforms.
class StreamSource final : public RandomSource {
  public:
    explicit StreamSource(RngState state) : m_state(state) {}

    double uniform() override { return uniform01(m_state); }

    double normal() override
    {
        if (m_have_spare) {
            m_have_spare = false;
            return m_spare;
        }
        const double u1 = 1.0 - uniform01(m_state);
        const double u2 = uniform01(m_state);
        auto [z0, z1] = box_muller(u1, u2);
        m_spare = z1;
        m_have_spare = true;
        return z0;
    }

    const RngState& state() const { return m_state; }

  private:
    RngState m_state;
    double m_spare = 0.0;
    bool m_have_spare = false;
};

/// Reads a depo's slice of the pool. Exhausting a slice is an error, not a
/// silent wrap.
class PoolSource final : public RandomSource {
  public:
    PoolSource(const RandomPool& pool, std::int64_t depo_id);

    double uniform() override;
    double normal() override;

    std::size_t uniforms_used() const { return m_u_next - m_begin; }
    std::size_t normals_used() const { return m_n_next - m_begin; }

  private:
    const RandomPool* m_pool;
    std::int64_t m_depo_id;
    std::size_t m_begin, m_end;
    std::size_t m_u_next, m_n_next;
};

/// Binomial(n, p) sample. CDF inversion consuming exactly one uniform while
/// n*min(p,1-p) <= 1e6; above that, one normal draw with continuity-corrected
/// rounding clamped to [0, n].
std::int64_t binomial(std::int64_t n, double p, RandomSource& src);
std::int64_t binomial(std::int64_t n, double p, RngState& state);

}  // namespace wiresim

#endif
