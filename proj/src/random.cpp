#include "degldp/random.hpp"

namespace degldp {
namespace {

// splitmix64 finalizer (Vigna). Full-avalanche 64-bit mixer.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

// FNV-1a over the label bytes; offsets the string-label space away from the
// integer-label space so fork("1") and fork(1) differ.
std::uint64_t hash_label(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return mix64(h ^ 0x5851f42d4c957f2dULL);
}

}  // namespace

RandomSource::RandomSource(std::uint64_t seed)
    : RandomSource(mix64(seed ^ 0xd1b54a32d192ed03ULL), FromKey{}) {}

RandomSource::RandomSource(std::uint64_t key, FromKey) : key_(key) {
  std::uint64_t s = key;
  for (auto& w : state_) {
    s = mix64(s);
    w = s;
  }
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RandomSource::next_u64() {
  // xoshiro256++
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RandomSource::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomSource::next_unit_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

bool RandomSource::next_bernoulli(double p) {
  return next_unit() < p;
}

std::uint64_t RandomSource::next_below(std::uint64_t bound) {
  // Reject the short residue range so every value in [0, bound) is equally
  // likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  std::uint64_t r = next_u64();
  while (r < threshold) r = next_u64();
  return r % bound;
}

RandomSource RandomSource::fork(std::uint64_t label) const {
  return RandomSource(mix64(key_ ^ mix64(label ^ 0xa0761d6478bd642fULL)),
                      FromKey{});
}

RandomSource RandomSource::fork(std::string_view label) const {
  return RandomSource(mix64(key_ ^ hash_label(label)), FromKey{});
}

}  // namespace degldp
