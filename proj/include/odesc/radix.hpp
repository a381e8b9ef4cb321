// Mixed-radix digit sequences: radix specifications, digit vectors, and the
// residue arithmetic that backs everything else in the library.
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "odesc/numeric.hpp"

namespace odesc {

// An infinite radix sequence j_1, j_2, ... with every j_n >= 2.
//
// Supported shapes: an eventually periodic list (finite preperiod followed by
// a repeating block), and two builtin unbounded families, j_n = n + 1
// ("factorial") and j_n = n-th prime ("primes").
//
// Text form, round-tripped bit-exactly by parse/to_string:
//   "2"        constant radix 2 (empty preperiod, period [2])
//   "2,3|4"    preperiod 2,3 then repeating 4
//   "factorial", "primes"
class RadixSpec {
 public:
  enum class Family { EventuallyPeriodic, Factorial, NthPrime };

  static RadixSpec constant(int j);
  static RadixSpec eventually_periodic(std::vector<int> preperiod,
                                       std::vector<int> period);
  static RadixSpec factorial();
  static RadixSpec nth_prime();
  static RadixSpec parse(std::string_view text);
  std::string to_string() const;

  Family family() const { return family_; }
  bool is_eventually_periodic() const {
    return family_ == Family::EventuallyPeriodic;
  }

  // j_n for 1-based position n.
  int radix_at(std::size_t n) const;

  // m_L = j_1 * j_2 * ... * j_L; m_0 = 1.
  BigInt modulus(std::size_t depth) const;

  // Structure accessors; both are empty for the builtin families.
  const std::vector<int>& preperiod() const { return preperiod_; }
  const std::vector<int>& period() const { return period_; }

  // True when the two specs denote the same radix sequence (representation
  // independent: "2" equals preperiod [2] with period [2,2]).
  friend bool operator==(const RadixSpec& a, const RadixSpec& b);
  friend bool operator!=(const RadixSpec& a, const RadixSpec& b) {
    return !(a == b);
  }

 private:
  RadixSpec(Family family, std::vector<int> preperiod, std::vector<int> period);

  Family family_;
  std::vector<int> preperiod_;  // EventuallyPeriodic only
  std::vector<int> period_;     // EventuallyPeriodic only, nonempty
};

// A finite block of digits x_1 .. x_L with 0 <= x_n < j_n.
struct DigitVector {
  RadixSpec spec;
  std::vector<int> digits;

  std::size_t depth() const { return digits.size(); }
};

// Validates digit bounds against the spec; throws UsageError on violation.
DigitVector make_digits(const RadixSpec& spec, std::vector<int> digits);

// Digit-wise addition with carry: z_n = (x_n + y_n + t_{n-1}) mod j_n,
// t_n = (x_n + y_n + t_{n-1}) div j_n, t_0 = 0. The final carry is discarded.
// Both vectors must share the spec and depth.
DigitVector add_digits(const DigitVector& xs, const DigitVector& ys);

// Value of the digit block as a residue: sum of x_n * m_{n-1}, in [0, m_L).
BigInt digits_to_residue(const DigitVector& xs);

// Inverse of digits_to_residue at a fixed depth. Requires 0 <= r < m_depth.
DigitVector residue_to_digits(const RadixSpec& spec, const BigInt& r,
                              std::size_t depth);

}  // namespace odesc
