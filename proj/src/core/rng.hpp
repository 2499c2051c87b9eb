#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ogtt {

// All randomness flows through RngStream so that every draw is reproducible
// from (root seed, scope string, replicate index) alone.  We roll our own
// uniform/normal/gamma transforms instead of std:: distributions because the
// standard leaves their algorithms unspecified and we promise bit-identical
// replay across compilers.

uint64_t fnv1a64(std::string_view s);

// splitmix64 finalizer; good avalanche, used to mix seed material.
uint64_t mix64(uint64_t x);

class RngStream {
 public:
  explicit RngStream(uint64_t seed) : eng_(seed) {}

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal, Box-Muller with a cached spare.
  double normal();

  // Gamma(shape, scale) by Marsaglia-Tsang; shape < 1 via the boost trick.
  double gamma(double shape, double scale);

  // Unbiased integer on {0, ..., n-1}.
  uint64_t uniform_index(uint64_t n);

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Derive an independent stream for one replicate of one named scope.  The
// derivation is a pure function, so replicate i of scope s sees the same
// stream no matter when or in what order streams are created.  That is what
// lets a grown estimate (e.g. 300 more outer replicates) replay the first
// 300 bit-for-bit.  salt distinguishes retries of a failed replicate.
RngStream derive_stream(uint64_t root_seed, std::string_view scope,
                        uint64_t index, uint64_t salt = 0);

// The raw derived seed, exposed for manifests/diagnostics.
uint64_t derive_seed(uint64_t root_seed, std::string_view scope,
                     uint64_t index, uint64_t salt = 0);

}  // namespace ogtt
