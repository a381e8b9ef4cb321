// Conjugacy classification of adding machines by per-prime multiplicity.
//
// Two adding machines are topologically conjugate exactly when, for every
// prime p, the total number of factors p across their radix sequences agrees
// (as a value in {0, 1, 2, ...} or infinity). That profile is computable:
//  * eventually periodic sequences give a finite table (period primes occur
//    infinitely often, preperiod-only primes finitely often, the rest never);
//  * the factorial sequence gives every prime infinite multiplicity;
//  * the increasing-primes sequence gives every prime multiplicity one.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "odesc/radix.hpp"

namespace odesc {

// Multiplicity of a single prime: a natural number or infinity.
struct PrimeCount {
  bool infinite = false;
  std::uint64_t count = 0;

  static PrimeCount finite(std::uint64_t n) { return {false, n}; }
  static PrimeCount inf() { return {true, 0}; }
  bool operator==(const PrimeCount& o) const {
    return infinite == o.infinite && (infinite || count == o.count);
  }
  bool operator!=(const PrimeCount& o) const { return !(*this == o); }
};

std::string to_string(const PrimeCount& c);

// The full profile p -> multiplicity, in one of three shapes.
class ConjugacyInvariant {
 public:
  enum class Kind {
    Tabulated,    // finitely many primes occur; explicit table
    AllOnes,      // every prime occurs exactly once
    AllInfinite,  // every prime occurs infinitely often
  };

  static ConjugacyInvariant of(const RadixSpec& spec);

  Kind kind() const { return kind_; }
  PrimeCount at(long long prime) const;
  // Primes with nonzero multiplicity; only meaningful for Tabulated.
  const std::map<long long, PrimeCount>& table() const { return table_; }
  std::string to_string() const;

  bool operator==(const ConjugacyInvariant& o) const;
  bool operator!=(const ConjugacyInvariant& o) const { return !(*this == o); }

 private:
  Kind kind_ = Kind::Tabulated;
  std::map<long long, PrimeCount> table_;
};

struct ConjugacyResult {
  bool conjugate = false;
  // Smallest prime whose multiplicities differ; set iff not conjugate.
  std::optional<long long> witness_prime;
};

ConjugacyResult conjugacy(const RadixSpec& a, const RadixSpec& b);

// True when every prime has infinite multiplicity.
bool is_infinity_adic(const RadixSpec& spec);

}  // namespace odesc
