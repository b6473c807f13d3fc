#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace rebal {

// Bijective 64-bit finalizer (the splitmix64 output function).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from a list of identifiers.  Every
// experiment cell (and every purpose inside a cell: data, pipeline, eval)
// gets its own stream, so results never depend on scheduling or worker
// count.  The scheme is fixed: fold each part into the running key with
// mix64 after a golden-ratio offset.
inline std::uint64_t seed_hash(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x8f1bbcdcbfa53e0bULL;
    for (std::uint64_t p : parts) {
        h = mix64((h + 0x9e3779b97f4a7c15ULL) ^ p);
    }
    return h;
}

// FNV-1a, used to fold method labels into seed derivations.
inline std::uint64_t hash_str(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Splittable counter-style generator (splitmix64): the state advances by a
// fixed odd constant and each output is a bijective mix of the counter.
// A stream is a pure function of its seed, identical across runs and across
// any parallel schedule.  Normal deviates come from Box-Muller; the second
// value of each pair is cached, so draws stay deterministic per stream.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    // Uniform on (0,1), endpoints excluded: 52 random bits centered in the
    // unit interval.  Safe to pass to log().
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
    }

    // Uniform integer in [0, m).  Multiply-shift map; the modulo bias is
    // below m / 2^64 and irrelevant at the scales used here.
    std::uint64_t next_below(std::uint64_t m) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * m) >> 64);
    }

    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_uniform();
        double u2 = next_uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace rebal
