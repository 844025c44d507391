#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace degldp {

// Deterministic splittable PRNG: xoshiro256++ core seeded via splitmix64.
//
// Every source carries an immutable 64-bit key. fork(label) derives a child
// whose key depends only on (parent key, label), never on how much of the
// parent stream has been consumed. A tree of substreams such as
//
//   master.fork("trial").fork(i).fork("user").fork(j)
//
// is therefore a pure function of the root seed and the labels, which makes
// results reproducible under any execution order or thread count.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit();

  // Uniform in (0, 1); never returns an endpoint. Used where a later
  // log(0) must be impossible.
  double next_unit_open();

  // True with probability p (one next_unit draw, consumed unconditionally).
  bool next_bernoulli(double p);

  // Uniform integer in [0, bound), bound >= 1. Rejection sampled, unbiased.
  std::uint64_t next_below(std::uint64_t bound);

  RandomSource fork(std::uint64_t label) const;
  RandomSource fork(std::string_view label) const;

  std::uint64_t key() const { return key_; }

 private:
  struct FromKey {};
  RandomSource(std::uint64_t key, FromKey);

  std::uint64_t key_;
  std::array<std::uint64_t, 4> state_;
};

}  // namespace degldp
