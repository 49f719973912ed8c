#include <mlpbsde/randomness.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mlpbsde {

namespace {

constexpr std::uint64_t kGammaLo = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kGammaHi = 0xD1B54A32D192ED03ULL;
constexpr std::uint64_t kInitLo = 0x8CB92BA72F3D8DD7ULL;
constexpr std::uint64_t kInitHi = 0x3C6EF372FE94F82AULL;

inline void absorb(StreamKey& k, std::uint64_t w) {
  k.lo = mix64(k.lo + w + kGammaLo);
  k.hi = mix64(k.hi ^ (w * kGammaHi) ^ k.lo);
}

// word -> [0,1); word 0 maps to 2^-64 so log() stays finite.
inline double to_unit_clamped(std::uint64_t w) {
  if (w == 0) return 0x1p-64;
  return static_cast<double>(w) * 0x1p-64;
}

inline double to_unit(std::uint64_t w) {
  return static_cast<double>(w) * 0x1p-64;
}

// Box-Muller on stream words 1, 2, ... (word 0 is the uniform slot).
void fill_normals(const StreamKey& key, int d, double* out) {
  const int pairs = (d + 1) / 2;
  for (int p = 0; p < pairs; ++p) {
    const double u1 = to_unit_clamped(stream_word(key, 1 + 2 * static_cast<std::uint64_t>(p)));
    const double u2 = to_unit(stream_word(key, 2 + 2 * static_cast<std::uint64_t>(p)));
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out[2 * p] = radius * std::cos(angle);
    if (2 * p + 1 < d) out[2 * p + 1] = radius * std::sin(angle);
  }
}

}  // namespace

ThetaPath ThetaPath::child(std::int64_t l, std::int64_t i) const {
  std::vector<std::int64_t> e = elems_;
  e.reserve(e.size() + 2);
  e.push_back(l);
  e.push_back(i);
  return ThetaPath(std::move(e));
}

std::vector<std::uint8_t> ThetaPath::encode() const {
  std::vector<std::uint8_t> out;
  out.reserve(8 * (elems_.size() + 1));
  auto put = [&out](std::uint64_t w) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(w >> (8 * b)));
  };
  put(static_cast<std::uint64_t>(elems_.size()));
  for (std::int64_t e : elems_) put(static_cast<std::uint64_t>(e));
  return out;
}

StreamKey derive_key(MasterSeed seed, const ThetaPath& theta) {
  StreamKey k{mix64(seed.value ^ kInitLo), mix64(seed.value ^ kInitHi)};
  const auto& elems = theta.elements();
  absorb(k, static_cast<std::uint64_t>(elems.size()));
  for (std::int64_t e : elems) absorb(k, static_cast<std::uint64_t>(e));
  return k;
}

std::uint64_t stream_word(const StreamKey& key, std::uint64_t j) {
  return mix64(key.lo + (j + 1) * kGammaLo) ^ mix64(key.hi + (j + 1) * kGammaHi);
}

NodeDraws node_draws(MasterSeed seed, const ThetaPath& theta, int d) {
  if (d < 1) throw std::invalid_argument("node_draws: d must be >= 1");
  const StreamKey key = derive_key(seed, theta);
  NodeDraws nd;
  nd.r = to_unit(stream_word(key, 0));
  nd.z.resize(static_cast<std::size_t>(d));
  fill_normals(key, d, nd.z.data());
  return nd;
}

void normal_draws(MasterSeed seed, const ThetaPath& theta, int d, double* out) {
  if (d < 1) throw std::invalid_argument("normal_draws: d must be >= 1");
  fill_normals(derive_key(seed, theta), d, out);
}

std::int64_t checked_pow(std::int64_t M, int n, std::int64_t limit) {
  if (M < 1) throw std::invalid_argument("checked_pow: M must be >= 1");
  if (n < 0) throw std::invalid_argument("checked_pow: n must be >= 0");
  std::int64_t p = 1;
  for (int i = 0; i < n; ++i) {
    if (p > limit / M) throw std::overflow_error("checked_pow: M^n exceeds resource guard");
    p *= M;
  }
  if (p > limit) throw std::overflow_error("checked_pow: M^n exceeds resource guard");
  return p;
}

BrownianPath brownian_path(MasterSeed seed, int d, std::int64_t M, int n, double T) {
  if (d < 1) throw std::invalid_argument("brownian_path: d must be >= 1");
  if (T <= 0.0) throw std::invalid_argument("brownian_path: T must be positive");
  const std::int64_t num_steps = checked_pow(M, n, 100'000'000);
  BrownianPath path(static_cast<std::size_t>(num_steps) + 1, d);
  const double sqrt_dt = std::sqrt(T / static_cast<double>(num_steps));
  std::vector<double> z(static_cast<std::size_t>(d));
  ThetaPath root;
  for (std::int64_t k = 1; k <= num_steps; ++k) {
    normal_draws(seed, root.child(kBrownianSentinel, k), d, z.data());
    const double* prev = path.node(static_cast<std::size_t>(k - 1));
    double* cur = path.node(static_cast<std::size_t>(k));
    for (int j = 0; j < d; ++j) cur[j] = prev[j] + sqrt_dt * z[j];
  }
  return path;
}

}  // namespace mlpbsde
