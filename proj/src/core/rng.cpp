#include "core/rng.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace ogtt {

uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));  // 1-u1 in (0,1]
  const double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

double RngStream::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw InputError("gamma: shape and scale must be positive");
  if (shape < 1.0) {
    // Boost: draw Gamma(shape+1) and multiply by U^(1/shape).
    const double u = uniform();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v * scale;
  }
}

uint64_t RngStream::uniform_index(uint64_t n) {
  if (n == 0) throw InputError("uniform_index: n must be positive");
  const uint64_t lim = UINT64_MAX - UINT64_MAX % n;
  uint64_t r;
  do {
    r = eng_();
  } while (r >= lim);
  return r % n;
}

uint64_t derive_seed(uint64_t root_seed, std::string_view scope,
                     uint64_t index, uint64_t salt) {
  uint64_t h = 0x6a09e667f3bcc908ull;
  h = mix64(h ^ root_seed);
  h = mix64(h ^ fnv1a64(scope));
  h = mix64(h ^ index);
  h = mix64(h ^ salt);
  return h;
}

RngStream derive_stream(uint64_t root_seed, std::string_view scope,
                        uint64_t index, uint64_t salt) {
  return RngStream(derive_seed(root_seed, scope, index, salt));
}

}  // namespace ogtt
