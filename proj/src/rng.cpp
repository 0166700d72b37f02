#include "wiresim/rng.hpp"

#include <cmath>

namespace wiresim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint64_t rotl(std::uint64_t x, int k)
{
    return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t splitmix64_next(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

RngState seed_state(std::uint64_t seed)
{
    RngState st;
    std::uint64_t sm = seed;
    for (auto& word : st.s) word = splitmix64_next(sm);
    // splitmix64 cannot emit four zero words in a row, but guard anyway:
    // xoshiro must never start from the all-zero state.
    if ((st.s[0] | st.s[1] | st.s[2] | st.s[3]) == 0) st.s[0] = 0x9e3779b97f4a7c15ULL;
    return st;
}

std::uint64_t next_u64(RngState& state)
{
    auto& s = state.s;
    const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
}

double uniform01(RngState& state)
{
    return static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53;
}

std::pair<double, double> box_muller(double u1, double u2)
{
    if (u1 <= 0.0 || u1 > 1.0) throw std::domain_error("box_muller: u1 must be in (0,1]");
    if (u2 < 0.0 || u2 >= 1.0) throw std::domain_error("box_muller: u2 must be in [0,1)");
    const double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
}

RngState substream(std::uint64_t seed, std::uint64_t stream_id)
{
    // Mix the stream id into the seed word before the splitmix64 chain so
    // neighboring ids land far apart in seed space.
    std::uint64_t sm = seed;
    std::uint64_t tag = stream_id;
    (void)splitmix64_next(tag);
    sm ^= splitmix64_next(tag);
    RngState st;
    for (auto& word : st.s) word = splitmix64_next(sm);
    if ((st.s[0] | st.s[1] | st.s[2] | st.s[3]) == 0) st.s[0] = 0x9e3779b97f4a7c15ULL;
    return st;
}

RandomPool build_pool(std::uint64_t seed, std::size_t n_depos, std::size_t slice_len)
{
    RandomPool pool;
    pool.seed = seed;
    pool.n_depos = n_depos;
    pool.slice_len = slice_len;
    const std::size_t total = n_depos * slice_len;
    try {
        pool.uniforms.resize(total);
        pool.normals.resize(total);
    } catch (const std::bad_alloc&) {
        throw std::runtime_error("build_pool: allocation of " + std::to_string(total) +
                                 " doubles per array failed");
    }

    RngState st = seed_state(seed);
    for (auto& u : pool.uniforms) u = uniform01(st);
    for (std::size_t i = 0; i + 1 < total; i += 2) {
        const double u1 = 1.0 - uniform01(st);
        const double u2 = uniform01(st);
        auto [z0, z1] = box_muller(u1, u2);
        pool.normals[i] = z0;
        pool.normals[i + 1] = z1;
    }
    if (total % 2 == 1) {
        const double u1 = 1.0 - uniform01(st);
        const double u2 = uniform01(st);
        pool.normals[total - 1] = box_muller(u1, u2).first;
    }
    return pool;
}

PoolSource::PoolSource(const RandomPool& pool, std::int64_t depo_id)
    : m_pool(&pool), m_depo_id(depo_id)
{
    if (depo_id < 0 || static_cast<std::size_t>(depo_id) >= pool.n_depos)
        throw std::out_of_range("PoolSource: depo id " + std::to_string(depo_id) +
                                " outside pool of " + std::to_string(pool.n_depos) + " slices");
    m_begin = static_cast<std::size_t>(depo_id) * pool.slice_len;
    m_end = m_begin + pool.slice_len;
    m_u_next = m_begin;
    m_n_next = m_begin;
}

double PoolSource::uniform()
{
    if (m_u_next >= m_end)
        throw PoolExhausted(m_depo_id, "random pool uniform slice exhausted for depo " +
                                           std::to_string(m_depo_id));
    return m_pool->uniforms[m_u_next++];
}

double PoolSource::normal()
{
    if (m_n_next >= m_end)
        throw PoolExhausted(m_depo_id, "random pool normal slice exhausted for depo " +
                                           std::to_string(m_depo_id));
    return m_pool->normals[m_n_next++];
}

namespace {

constexpr double kNormalApproxThreshold = 1e6;

// Smallest k with CDF(k) > u, p <= 0.5. The running pmf is seeded from
// (1-p)^n directly when representable; otherwise the walk starts 30 sigma
// below the mean (the cumulative mass below that is < 1e-190, smaller than
// any nonzero uniform) with the pmf seeded through lgamma.
std::int64_t invert_binomial_cdf(std::int64_t n, double p, double u)
{
    const double odds = p / (1.0 - p);
    std::int64_t k = 0;
    double pmf;
    const double log_pmf0 = static_cast<double>(n) * std::log1p(-p);
    if (log_pmf0 > -700.0) {
        pmf = std::exp(log_pmf0);
    } else {
        const double mean = static_cast<double>(n) * p;
        const double sd = std::sqrt(mean * (1.0 - p));
        k = std::max<std::int64_t>(0, static_cast<std::int64_t>(mean - 30.0 * sd));
        const double nd = static_cast<double>(n);
        const double kd = static_cast<double>(k);
        pmf = std::exp(std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
                       kd * std::log(p) + (nd - kd) * std::log1p(-p));
    }
    double cdf = pmf;
    while (cdf <= u && k < n) {
        pmf *= odds * static_cast<double>(n - k) / static_cast<double>(k + 1);
        ++k;
        cdf += pmf;
    }
    return k;
}

}  // namespace

std::int64_t binomial(std::int64_t n, double p, RandomSource& src)
{
    if (n < 0) throw std::invalid_argument("binomial: n must be >= 0");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("binomial: p must be in [0,1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;

    const double mean = static_cast<double>(n) * p;
    const double var = mean * (1.0 - p);
    if (static_cast<double>(n) * std::min(p, 1.0 - p) > kNormalApproxThreshold) {
        const double k = std::round(mean + std::sqrt(var) * src.normal());
        if (k < 0.0) return 0;
        if (k > static_cast<double>(n)) return n;
        return static_cast<std::int64_t>(k);
    }

    const double u = src.uniform();
    if (p > 0.5) return n - invert_binomial_cdf(n, 1.0 - p, u);
    return invert_binomial_cdf(n, p, u);
}

std::int64_t binomial(std::int64_t n, double p, RngState& state)
{
    StreamSource src(state);
    const std::int64_t k = binomial(n, p, src);
    state = src.state();
    return k;
}

}  // namespace wiresim
