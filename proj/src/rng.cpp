#include "otoc/rng.hpp"

namespace otoc {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x2545f4914f6cdd1dULL))) {}

CounterRng::result_type CounterRng::operator()() {
  // Two rounds: a single splitmix round over key + n*golden has visible
  // correlations between neighbouring keys.
  return splitmix64(splitmix64(key_ + (++counter_) * kGolden) ^ key_);
}

double CounterRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

CounterRng CounterRng::split(std::uint64_t stream) const {
  CounterRng child(key_, stream);
  return child;
}

}  // namespace otoc
