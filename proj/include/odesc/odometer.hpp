// Adding machines on mixed-radix digit spaces: points, the +1 map and its
// integer iterates, the 2^-n ultrametric, cylinders, and first-hit times.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "odesc/radix.hpp"

namespace odesc {

// A point of the digit space. Two kinds:
//
//  * Exact: a finite digit prefix followed by a tail that is either a
//    repeating block ("periodic") or the position-wise maximal digit
//    j_n - 1 ("max"). The max tail exists because subtracting 1 from an
//    all-zero tail must stay representable even when the radix sequence is
//    not eventually periodic (factorial/primes), where "all digits maximal"
//    is not a periodic stream.
//  * Sampled: digits drawn lazily by a deterministic counter-based generator
//    keyed by (seed, position), memoized, uniform on [0, j_n).
//
// Text form: "digits:1,0,1|0" (prefix|repeating block), "digits:1,0,1"
// (shorthand for a zero tail), "digits:1|max" (max tail), "seed:42".
class AdicPoint {
 public:
  enum class Tail { Periodic, MaxDigit };

  static AdicPoint exact(const RadixSpec& spec, std::vector<int> prefix,
                         std::vector<int> block);
  static AdicPoint exact_max_tail(const RadixSpec& spec,
                                  std::vector<int> prefix);
  static AdicPoint zero(const RadixSpec& spec);
  // Digits of r at the given depth, then a zero tail.
  static AdicPoint from_residue(const RadixSpec& spec, const BigInt& r,
                                std::size_t depth);
  static AdicPoint sampled(const RadixSpec& spec, std::uint64_t seed);
  static AdicPoint parse(const RadixSpec& spec, std::string_view text);
  std::string to_string() const;

  const RadixSpec& spec() const { return spec_; }
  bool is_exact() const { return !sampled_state_; }
  bool is_sampled() const { return static_cast<bool>(sampled_state_); }

  // Digit x_n, 1-based. Sampled digits are materialized on demand; the memo
  // is shared between copies and synchronized, so reads are observably pure.
  int digit(std::size_t n) const;

  // Value of the first `depth` digits in [0, m_depth).
  BigInt residue(std::size_t depth) const;

  // Exact-only structure accessors.
  const std::vector<int>& prefix() const { return prefix_; }
  Tail tail() const { return tail_; }
  const std::vector<int>& block() const { return block_; }
  std::uint64_t seed() const;

 private:
  AdicPoint(const RadixSpec& spec);

  struct SampledState;

  RadixSpec spec_;
  std::vector<int> prefix_;
  Tail tail_ = Tail::Periodic;
  std::vector<int> block_;  // nonempty for exact periodic tails
  std::shared_ptr<SampledState> sampled_state_;
};

// Decides whether two exact points have identical digit streams.
bool same_point(const AdicPoint& x, const AdicPoint& y);

// The set of points sharing a digit prefix: depth L and residue in [0, m_L).
// Depth 0 is the whole space.
struct Cylinder {
  RadixSpec spec;
  std::size_t depth = 0;
  BigInt residue;
};

bool contains(const Cylinder& c, const AdicPoint& x);

// Two cylinders meet iff the deeper residue reduces to the shallower one.
bool cylinders_intersect(const Cylinder& a, const Cylinder& b);

// Value of the ultrametric d(x, y) = 2^-n, n the first differing position.
// Exact for pairs of exact points (and for sampled points sharing a seed);
// otherwise resolved up to a depth cap.
struct UltraDistance {
  enum class Kind {
    Zero,              // proved equal
    PowerOfHalf,       // first difference at `exponent`, d = 2^-exponent
    IndeterminateBelow // no difference up to the cap; d < 2^-exponent
  };
  Kind kind = Kind::Zero;
  std::size_t exponent = 0;

  bool is_zero() const { return kind == Kind::Zero; }
  Rational value() const;  // PowerOfHalf only
};

UltraDistance distance(const AdicPoint& x, const AdicPoint& y,
                       std::size_t depth_cap = 256);

// x + k for a (signed) integer k, digit-wise with carry/borrow. Exact points
// only; the result is exact. translate(x, 1) is the adding-machine map.
AdicPoint translate(const AdicPoint& x, const BigInt& k);

// Canonical depth for an open metric ball of radius rho > 0: the unique
// L >= 0 with 2^-(L+1) < rho <= 2^-L (L = 0 for rho > 1). The ball around
// `center` is exactly the cylinder fixing its first L digits.
Cylinder ball_to_cylinder(const AdicPoint& center, const Rational& rho);
std::size_t radius_to_depth(const Rational& rho);

// First time the forward orbit of x enters the cylinder, in closed form:
// (c.residue - x.residue(L)) mod m_L. Always finite, < m_L.
BigInt first_hit(const AdicPoint& x, const Cylinder& c);

// Independent oracle: iterates digit-wise +1 at depth c.depth and tests
// membership by digit comparison, for steps 0..horizon inclusive.
// Returns nullopt when no hit occurs within the horizon.
std::optional<BigInt> first_hit_bruteforce(const AdicPoint& x,
                                           const Cylinder& c,
                                           std::uint64_t horizon);

// Decides whether y = translate(x, k) for some integer k and returns that k.
// nullopt means the two points lie on distinct orbits of the +1 map.
// Requires exact points on a common spec.
std::optional<BigInt> same_orbit(const AdicPoint& x, const AdicPoint& y);

// Exhaustively checks, at depth i, that the +1 map cycles the m_i cylinders
// (one representative each) and that depth-(i+1) cylinders partition each
// depth-i cylinder into exactly j_{i+1} pieces.
bool verify_cyclic_partition(const RadixSpec& spec, std::size_t depth);

}  // namespace odesc
