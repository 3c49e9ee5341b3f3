#include "evohull/random.hpp"

#include <cmath>
#include <numbers>

#include "evohull/error.hpp"

namespace evohull {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidGenotype: return "invalid-genotype";
    case ErrorCode::UnsupportedOperation: return "unsupported-operation";
    case ErrorCode::OutOfRange: return "out-of-range";
    case ErrorCode::InvalidDistribution: return "invalid-distribution";
    case ErrorCode::InvalidRelation: return "invalid-relation";
    case ErrorCode::InvalidParams: return "invalid-params";
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::InvalidConfig: return "invalid-config";
    case ErrorCode::DegenerateInput: return "degenerate-input";
    case ErrorCode::NotInGeneralPosition: return "not-in-general-position";
    case ErrorCode::InvalidApex: return "invalid-apex";
    case ErrorCode::UnboundedFeasibleSet: return "unbounded-feasible-set";
    case ErrorCode::InvalidProblem: return "invalid-problem";
    case ErrorCode::DegenerateTriangle: return "degenerate-triangle";
    case ErrorCode::IllegalSwap: return "illegal-swap";
    case ErrorCode::InvalidMesh: return "invalid-mesh";
    case ErrorCode::InstanceRejected: return "instance-rejected";
    case ErrorCode::FileNotFound: return "file-not-found";
    case ErrorCode::ParseError: return "parse-error";
  }
  return "unknown";
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

RandomStream RandomStream::substream(std::string_view name) const {
  return RandomStream(splitmix64(seed_ ^ splitmix64(fnv1a(name))));
}

RandomStream RandomStream::substream(std::uint64_t index) const {
  return RandomStream(splitmix64(seed_ + splitmix64(index + 0x5851f42d4c957f2dULL)));
}

std::uint64_t RandomStream::next_u64() {
  ++draws_;
  return engine_();
}

std::uint64_t RandomStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidParams, "uniform_index over an empty range");
  // Rejection sampling on the largest multiple of n below 2^64.
  const std::uint64_t limit = std::uint64_t(0) - (std::uint64_t(0) - n) % n;
  for (;;) {
    const std::uint64_t x = next_u64();
    if (limit == 0 || x < limit) return x % n;
  }
}

double RandomStream::uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

bool RandomStream::bernoulli(double p) { return uniform01() < p; }

double RandomStream::normal() {
  // Box-Muller; one variate per call keeps the draw count easy to reason about.
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace evohull
