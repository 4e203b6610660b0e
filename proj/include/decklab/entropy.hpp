#ifndef DECKLAB_ENTROPY_HPP
#define DECKLAB_ENTROPY_HPP

#include "decklab/errors.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

namespace decklab {

/// splitmix64 output function: a bijective avalanche mix.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Abstract draw source. Implementations must make next_u64 uniform on
/// 64-bit words; next_u32 may be cheaper for sources where bits are
/// expensive.
class Rng {
public:
    virtual ~Rng() = default;
    virtual std::uint64_t next_u64() = 0;
    virtual std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64()); }

    /// Uniform value in [0, n). Lemire rejection sampling; unbiased.
    std::uint32_t below(std::uint32_t n) {
        // n == 1 happens constantly (one-card sub-decks); skip the draw.
        if (n <= 1) return 0;
        std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * n;
        auto lo = static_cast<std::uint32_t>(m);
        if (lo < n) {
            const std::uint32_t threshold = (0u - n) % n;
            while (lo < threshold) {
                m = static_cast<std::uint64_t>(next_u32()) * n;
                lo = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }
};

/// Counter-based deterministic source: draw i of stream (seed, stream) is
/// mix64 applied to a per-stream base plus the draw index. Any draw is
/// addressable directly, so trial t of a run can use its own stream and
/// results do not depend on how trials are divided among threads.
class CounterRng final : public Rng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) { reset_stream(seed, stream); }

    /// Jump to the start of another stream; draws restart at index zero.
    void reset_stream(std::uint64_t seed, std::uint64_t stream) {
        base_ = mix64(mix64(seed) ^ (stream * 0xd6e8feb86659fd93ull));
        counter_ = 0;
    }

    std::uint64_t next_u64() override {
        return mix64(base_ + (counter_++) * 0x9e3779b97f4a7c15ull);
    }

private:
    std::uint64_t base_ = 0;
    std::uint64_t counter_ = 0;
};

/// Buffered reader of an OS entropy device. Never falls back to anything:
/// if the device cannot be opened or runs dry, draws throw EntropyError.
class DeviceRng final : public Rng {
public:
    explicit DeviceRng(const std::string& path = "/dev/urandom", std::size_t buffer_bytes = 65536)
        : path_(path), buf_(buffer_bytes) {
        file_ = std::fopen(path.c_str(), "rb");
        if (!file_) throw EntropyError("cannot open entropy device '" + path + "'");
    }

    ~DeviceRng() override {
        if (file_) std::fclose(file_);
    }

    DeviceRng(const DeviceRng&) = delete;
    DeviceRng& operator=(const DeviceRng&) = delete;

    std::uint64_t next_u64() override {
        std::uint64_t v;
        fetch(&v, sizeof v);
        return v;
    }

    std::uint32_t next_u32() override {
        std::uint32_t v;
        fetch(&v, sizeof v);
        return v;
    }

private:
    void fetch(void* out, std::size_t n) {
        while (fill_ - used_ < n) refill();
        std::memcpy(out, buf_.data() + used_, n);
        used_ += n;
    }

    void refill() {
        // Keep any unconsumed tail.
        const std::size_t tail = fill_ - used_;
        std::memmove(buf_.data(), buf_.data() + used_, tail);
        used_ = 0;
        fill_ = tail;
        const std::size_t got = std::fread(buf_.data() + fill_, 1, buf_.size() - fill_, file_);
        if (got == 0)
            throw EntropyError("entropy device '" + path_ + "' yielded no data");
        fill_ += got;
    }

    std::string path_;
    std::FILE* file_ = nullptr;
    std::vector<unsigned char> buf_;
    std::size_t used_ = 0;
    std::size_t fill_ = 0;
};

/// Uniform in-place shuffle (Fisher-Yates, descending index).
template <typename T>
void shuffle_cards(std::vector<T>& cards, Rng& rng) {
    for (std::size_t i = cards.size(); i > 1; --i) {
        const std::size_t j = rng.below(static_cast<std::uint32_t>(i));
        std::swap(cards[i - 1], cards[j]);
    }
}

}  // namespace decklab

#endif
