#include "epictl/rng.hpp"

#include <cmath>

namespace epictl {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream, std::uint64_t index) {
  return mix64(mix64(mix64(parent) ^ stream) + index);
}

double counter_exponential(std::uint64_t key, std::uint64_t channel, std::uint64_t count) {
  const std::uint64_t bits = mix64(derive_seed(key, channel, count));
  // Midpoint of a 53-bit cell: never 0, never 1.
  const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  return -std::log(u);
}

double Rng::exponential(double rate) {
  // u in (0, 1) so the waiting time is strictly positive.
  double u = uniform();
  while (u == 0.0) u = uniform();
  return -std::log(u) / rate;
}

std::uint64_t Rng::index(std::uint64_t n) {
  // Rejection on the top of the range removes modulo bias.
  const std::uint64_t limit = n * (UINT64_MAX / n);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

}  // namespace epictl
