#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qcnn {

/// Raised when a file cannot be read or written.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based child seed: independent streams for (root, stream, index).
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream,
                                    std::uint64_t index = 0) {
    return mix64(mix64(mix64(root) ^ stream) + index);
}

/// Small deterministic generator (SplitMix64), usable with <random> distributions.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    /// Uniform integer in [0, bound) by rejection, identical on every platform.
    std::uint64_t below(std::uint64_t bound);
    /// Standard normal draw (Box-Muller, one value per call).
    double normal();

  private:
    std::uint64_t state_;
};

/// Fisher-Yates shuffle of 0..n-1 driven by `rng`.
std::vector<std::size_t> shuffled_indices(std::size_t n, SplitMix64 &rng);

/// FNV-1a 64-bit hash, hex-encoded.
std::string fnv1a_hex(std::string_view bytes);

/// Run fn(i) for i in [0, n) on up to `workers` threads. Exceptions propagate.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)> &fn);

/// Pairwise (tree) summation; the association order depends only on the input length.
double pairwise_sum(std::span<const double> values);

/// Write `contents` to `path` via a temporary file and rename.
void write_file_atomic(const std::filesystem::path &path, std::string_view contents);
std::string read_file(const std::filesystem::path &path);

} // namespace qcnn
