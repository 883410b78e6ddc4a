#pragma once

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <cstdint>
#include <string_view>

namespace hetassoc {

//! Versioned random stream. Boost.Random is used rather than <random>
//! because its distribution algorithms are fixed across platforms, which
//! keeps seeded output bit-identical everywhere.
class Rng
{
public:
  static constexpr std::string_view algorithm = "boost-mt19937_64/ziggurat-normal/v1";

  explicit Rng(std::uint64_t seed)
    : engine_(seed)
  {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t bits() { return engine_(); }

private:
  boost::random::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
  boost::random::uniform_01<double> uniform_;
};

//! Deterministic child seed for stream `index` of a master seed
//! (splitmix64 finalizer over the pair).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index)
{
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

} // namespace hetassoc
