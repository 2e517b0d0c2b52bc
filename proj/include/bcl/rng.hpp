#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace bcl {

// All variate generators below draw raw 64-bit words and keep no hidden
// state, so serializing the engine alone reproduces a stream bit-exactly.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based seed splitting: the seed of (stream, index) depends only on
// the master seed and the two counters, never on scheduling order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index = 0);

double uniform01(Rng& rng);  // open interval (0, 1)
double std_normal(Rng& rng);
double exponential(Rng& rng, double rate);
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);
std::uint64_t poisson(Rng& rng, double mean);

// Marsaglia-Tsang squeeze sampler; shape < 1 via the U^{1/shape} boost.
double gamma_variate(Rng& rng, double shape, double rate);

std::string rng_state(const Rng& rng);
void set_rng_state(Rng& rng, const std::string& text);

}  // namespace bcl
