#ifndef DISCOP_RNG_HPP
#define DISCOP_RNG_HPP

#include <cstdint>
#include <initializer_list>

namespace discop {

// splitmix64 step (Steele, Lea & Flood). Used both as a stream generator and,
// through key mixing, as a counter-based source: a stream keyed by
// (seed, trial, ...) is reproducible regardless of what other streams did.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class SeededStream {
public:
    explicit SeededStream(std::initializer_list<std::uint64_t> keys) : state_(0x243f6a8885a308d3ULL) {
        for (std::uint64_t k : keys) {
            state_ ^= k + 0x9e3779b97f4a7c15ULL + (state_ << 6) + (state_ >> 2);
            (void)splitmix64(state_);
        }
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in the open interval (0,1); never returns an endpoint
    double next_u01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // uniform integer in [lo, hi]
    int next_int(int lo, int hi) {
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

private:
    std::uint64_t state_;
};

} // namespace discop

#endif
