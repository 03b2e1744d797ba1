#pragma once

#include <array>
#include <cstdint>

namespace coreset {

//! Philox4x32-10 block function. Pure: the same (counter, key) always gives
//! the same four words.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

//! Counter-based stream. The 64-bit seed is the key; the counter holds a
//! 64-bit block index and a 64-bit stream id, so streams with different ids
//! never overlap and any trial can be replayed on its own.
class Philox {
public:
    explicit Philox(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

    std::uint64_t next_u64() noexcept;
    //! Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    //! Uniform on (0, 1].
    double uniform_pos() noexcept { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }
    //! Standard normal by Box-Muller, implemented here so results do not
    //! depend on the standard library.
    double normal() noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4; // next unread 32-bit word of buf_
    bool has_spare_ = false;
    double spare_ = 0.0;
};

//! Seed of sub-stream `index` derived from `base`; used for per-trial seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

} // namespace coreset
