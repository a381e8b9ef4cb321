// Shared exact-arithmetic aliases, error type and small numeric helpers.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace odesc {

// All residue/counter arithmetic is arbitrary precision: moduli grow
// exponentially with depth and must never overflow.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Violated precondition or malformed input. The CLI maps this to exit code 2.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// a mod m with the result normalized into [0, m). Requires m > 0.
BigInt floor_mod(const BigInt& a, const BigInt& m);

// Parses "p/q" or a plain integer "p". Throws UsageError on garbage or q == 0.
Rational parse_rational(std::string_view text);

// Serializes as "p/q", or "p" when the denominator is 1.
std::string rational_to_string(const Rational& r);

// splitmix64 finalizer; the building block for all deterministic sampling.
std::uint64_t mix64(std::uint64_t z);

// Deterministic per-counter seed derivation (e.g. one seed per trial).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter);

// Deterministic counter-based uniform draw from [0, bound) keyed by
// (seed, stream, index). Unbiased via rejection sampling. Requires bound >= 1.
std::uint64_t uniform_draw(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t index, std::uint64_t bound);

// Log verbosity from the ODESC_LOG environment variable (0 = quiet, the
// default; 1 = info; 2 = debug). Read once per process.
int log_level();

}  // namespace odesc
