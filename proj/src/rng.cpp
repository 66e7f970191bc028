#include "sobol_eff/rng.hpp"

#include "sobol_eff/core.hpp"

namespace sobol_eff {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> CounterRng::block(std::uint64_t row,
                                               std::uint32_t stream) const {
  std::array<std::uint32_t, 4> c = {static_cast<std::uint32_t>(row),
                                    static_cast<std::uint32_t>(row >> 32), stream,
                                    seed_.replication_index};
  std::uint32_t k0 = static_cast<std::uint32_t>(seed_.master_seed);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed_.master_seed >> 32);
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return c;
}

double CounterRng::uniform(std::uint64_t row, std::uint32_t stream) const {
  const auto c = block(row, stream);
  const std::uint64_t bits = (static_cast<std::uint64_t>(c[0]) << 32) | c[1];
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t row, std::uint32_t stream) const {
  return normal_quantile(uniform(row, stream));
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace sobol_eff
