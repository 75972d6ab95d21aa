#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

namespace slab {

// SplitMix64 finalizer. Full-period mixer; used both as the stream generator
// and as the hash combiner for deriving task keys.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

std::uint64_t hash_string(std::string_view s);

/// Counter-based random stream: output i is mix64(key + i*gamma), so any draw
/// is addressable in O(1) and streams keyed by (seed, tag) are independent of
/// scheduling order. Doubles carry 53 random bits; normals use Box-Muller.
class Rng {
  public:
    Rng(std::uint64_t seed, std::string_view tag);
    Rng(std::uint64_t seed, std::uint64_t tag);
    explicit Rng(std::uint64_t key) : key_(key) {}

    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64() { return mix64(key_ + counter_++ * 0x9e3779b97f4a7c15ULL); }

    /// Uniform on (0, 1].
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal();

    Eigen::VectorXd normal_vector(Eigen::Index n);
    Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);

  private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace slab
