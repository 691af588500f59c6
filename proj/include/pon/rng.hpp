// Seeded counter-based RNG (splitmix64 core). Bit-exact across platforms,
// which keeps every experiment reproducible from its seed alone.

#pragma once

#include <cmath>
#include <cstdint>

namespace pon {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; generated in pairs.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        double u2 = next_double();
        while (u1 <= 0.0)
            u1 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925287 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    int next_bit() {
        if (bits_left_ == 0) {
            bit_word_ = next_u64();
            bits_left_ = 64;
        }
        int b = static_cast<int>(bit_word_ & 1u);
        bit_word_ >>= 1;
        --bits_left_;
        return b;
    }

    // Derive an independent stream, e.g. one per experiment run.
    Rng fork(std::uint64_t stream_id) {
        Rng child(state_ ^ (0xd1342543de82ef95ULL * (stream_id + 1)));
        child.next_u64();
        return child;
    }

  private:
    std::uint64_t state_;
    std::uint64_t bit_word_ = 0;
    int bits_left_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace pon
