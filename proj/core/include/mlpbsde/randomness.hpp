#pragma once

// Deterministic, splittable random streams keyed by a multi-index path.
// Every draw is addressable by (master seed, path, dimension) alone; no
// generator state is carried between calls.  The exact bit-level layout of
// the encoding, the mixing function, and the Box-Muller convention are
// documented in FORMAT.md at the repository root.

#include <cstdint>
#include <vector>

namespace mlpbsde {

struct MasterSeed {
  std::uint64_t value = 0;
};

// A finite sequence of signed 64-bit integers addressing one stream.
// The empty path is the root; child(l, i) appends the two elements (l, i).
class ThetaPath {
 public:
  ThetaPath() = default;
  explicit ThetaPath(std::vector<std::int64_t> elems) : elems_(std::move(elems)) {}

  [[nodiscard]] ThetaPath child(std::int64_t l, std::int64_t i) const;
  [[nodiscard]] const std::vector<std::int64_t>& elements() const { return elems_; }
  [[nodiscard]] bool empty() const { return elems_.empty(); }

  // Length-framed little-endian byte encoding (prefix-free across lengths).
  [[nodiscard]] std::vector<std::uint8_t> encode() const;

  bool operator==(const ThetaPath&) const = default;

 private:
  std::vector<std::int64_t> elems_;
};

inline ThetaPath child(const ThetaPath& theta, std::int64_t l, std::int64_t i) {
  return theta.child(l, i);
}

// 128-bit stream key derived from (seed, theta).
struct StreamKey {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
};

StreamKey derive_key(MasterSeed seed, const ThetaPath& theta);

// j-th 64-bit output word of the keyed stream, j = 0, 1, 2, ...
std::uint64_t stream_word(const StreamKey& key, std::uint64_t j);

struct NodeDraws {
  double r = 0.0;            // uniform on [0,1), from word 0
  std::vector<double> z;     // standard normal in R^d, from words 1, 2, ...
};

// The (r, z) pair consumed at one node of the MLP recursion.  Pure function
// of its arguments; repeated calls are bit-identical.
NodeDraws node_draws(MasterSeed seed, const ThetaPath& theta, int d);

// Only the normal vector of the same stream (word layout identical to
// node_draws; word 0 is simply never converted).  Used where no uniform
// time variable is consumed, e.g. terminal-condition leaves and Brownian
// increments.
void normal_draws(MasterSeed seed, const ThetaPath& theta, int d, double* out);

// Brownian path at the nodes {k*T/M^n : k = 0..M^n}, W_0 = 0, built by
// cumulative summation of N(0, (T/M^n) I_d) increments drawn from the
// reserved sub-stream [SENTINEL, k].  Coarser grids {k*T/M^l}, l <= n, are
// read from the same array at indices k*M^(n-l).
class BrownianPath {
 public:
  BrownianPath(std::size_t num_nodes, int d)
      : d_(d), data_(num_nodes * static_cast<std::size_t>(d), 0.0) {}

  [[nodiscard]] std::size_t num_nodes() const { return data_.size() / d_; }
  [[nodiscard]] int dim() const { return d_; }
  [[nodiscard]] const double* node(std::size_t k) const { return data_.data() + k * d_; }
  [[nodiscard]] double* node(std::size_t k) { return data_.data() + k * d_; }

 private:
  int d_;
  std::vector<double> data_;
};

// First path element reserved for the Brownian sub-stream; MLP indices never
// produce it (levels are small nonnegative integers, inner indices fit far
// away from the int64 minimum).
inline constexpr std::int64_t kBrownianSentinel = INT64_MIN;

BrownianPath brownian_path(MasterSeed seed, int d, std::int64_t M, int n, double T);

// M^n with overflow/guard check against `limit`; throws std::overflow_error.
std::int64_t checked_pow(std::int64_t M, int n, std::int64_t limit);

// splitmix64 finalizer, the scalar mixing primitive (see FORMAT.md).
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

// Deterministic seed sequence for macro-replications: element r of the
// sequence rooted at `base`.
inline MasterSeed replication_seed(MasterSeed base, std::uint64_t r) {
  return MasterSeed{mix64(base.value + (r + 1) * 0x9E3779B97F4A7C15ULL)};
}

}  // namespace mlpbsde
