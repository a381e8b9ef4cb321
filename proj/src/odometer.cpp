#include "odesc/odometer.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <sstream>

namespace odesc {

namespace {

// Digits of x strictly after position `pos`, described as (extra prefix,
// tail kind, block). Used to splice an unchanged tail onto a fresh prefix.
struct TailView {
  std::vector<int> extra;
  AdicPoint::Tail tail;
  std::vector<int> block;
};

TailView tail_view_after(const AdicPoint& x, std::size_t pos) {
  const auto& prefix = x.prefix();
  TailView out;
  out.tail = x.tail();
  if (pos < prefix.size()) {
    out.extra.assign(prefix.begin() + static_cast<std::ptrdiff_t>(pos),
                     prefix.end());
    out.block = x.block();
    return out;
  }
  if (x.tail() == AdicPoint::Tail::MaxDigit) return out;
  // Rotate the repeating block so it starts at position pos + 1.
  const auto& block = x.block();
  const std::size_t shift = (pos - prefix.size()) % block.size();
  out.block.reserve(block.size());
  out.block.insert(out.block.end(),
                   block.begin() + static_cast<std::ptrdiff_t>(shift),
                   block.end());
  out.block.insert(out.block.end(), block.begin(),
                   block.begin() + static_cast<std::ptrdiff_t>(shift));
  return out;
}

AdicPoint splice(const RadixSpec& spec, std::vector<int> head, TailView tv) {
  head.insert(head.end(), tv.extra.begin(), tv.extra.end());
  if (tv.tail == AdicPoint::Tail::MaxDigit) {
    return AdicPoint::exact_max_tail(spec, std::move(head));
  }
  return AdicPoint::exact(spec, std::move(head), std::move(tv.block));
}

int max_block_digit(const std::vector<int>& block) {
  return *std::max_element(block.begin(), block.end());
}

bool all_zero(const std::vector<int>& block) {
  return std::all_of(block.begin(), block.end(), [](int d) { return d == 0; });
}

// First position where the digit streams of two exact points differ, or
// nullopt when they are provably identical. The comparison window is chosen
// so that agreement within it forces agreement everywhere:
//  * periodic/periodic tails: both streams are periodic past the longer
//    prefix, so one least common multiple of the block lengths decides;
//  * max/max tails: identical past the longer prefix by definition;
//  * periodic/max: on an eventually periodic spec the max tail is itself
//    periodic (period = spec period); on factorial/primes the radixes grow
//    past any fixed block, so a difference is forced once j_n - 1 exceeds
//    the largest block digit.
std::optional<std::size_t> first_difference(const AdicPoint& x,
                                            const AdicPoint& y) {
  const RadixSpec& spec = x.spec();
  const std::size_t px = x.prefix().size();
  const std::size_t py = y.prefix().size();
  const std::size_t s = std::max(px, py);
  const bool xmax = x.tail() == AdicPoint::Tail::MaxDigit;
  const bool ymax = y.tail() == AdicPoint::Tail::MaxDigit;

  std::size_t window;
  if (xmax && ymax) {
    window = s;
  } else if (!xmax && !ymax) {
    window = s + std::lcm(x.block().size(), y.block().size());
  } else if (spec.is_eventually_periodic()) {
    const auto& block = xmax ? y.block() : x.block();
    window = std::max(s, spec.preperiod().size()) +
             std::lcm(block.size(), spec.period().size());
  } else {
    const int maxb = max_block_digit(xmax ? y.block() : x.block());
    std::size_t n = s + 1;
    while (spec.radix_at(n) - 1 <= maxb) ++n;
    window = n;
  }

  for (std::size_t n = 1; n <= window; ++n) {
    if (x.digit(n) != y.digit(n)) return n;
  }
  return std::nullopt;
}

void check_same_spec(const RadixSpec& a, const RadixSpec& b,
                     const char* where) {
  if (a != b) {
    throw UsageError(std::string(where) + ": mismatched radix specs");
  }
}

void check_cylinder(const Cylinder& c) {
  if (c.residue < 0 || c.residue >= c.spec.modulus(c.depth)) {
    throw UsageError("cylinder residue " + c.residue.str() +
                     " out of range for depth " + std::to_string(c.depth));
  }
}

std::vector<int> parse_digit_list(std::string_view text) {
  std::vector<int> out;
  if (text.empty()) return out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      long v = std::stol(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      out.push_back(static_cast<int>(v));
    } catch (const std::exception&) {
      throw UsageError("malformed digit '" + item + "'");
    }
  }
  return out;
}

std::string join_digits(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

}  // namespace

struct AdicPoint::SampledState {
  std::uint64_t seed = 0;
  mutable std::mutex mu;
  mutable std::vector<int> memo;
};

AdicPoint::AdicPoint(const RadixSpec& spec) : spec_(spec) {}

AdicPoint AdicPoint::exact(const RadixSpec& spec, std::vector<int> prefix,
                           std::vector<int> block) {
  if (block.empty()) {
    throw UsageError("exact point needs a nonempty repeating block");
  }
  AdicPoint p(spec);
  p.prefix_ = std::move(prefix);
  p.block_ = std::move(block);

  for (std::size_t i = 0; i < p.prefix_.size(); ++i) {
    const int j = spec.radix_at(i + 1);
    if (p.prefix_[i] < 0 || p.prefix_[i] >= j) {
      throw UsageError("digit " + std::to_string(p.prefix_[i]) +
                       " at position " + std::to_string(i + 1) +
                       " out of range [0, " + std::to_string(j) + ")");
    }
  }
  for (int d : p.block_) {
    if (d < 0) throw UsageError("negative digit in repeating block");
  }

  const std::size_t px = p.prefix_.size();
  auto block_digit = [&](std::size_t n) {
    return p.block_[(n - px - 1) % p.block_.size()];
  };
  if (spec.is_eventually_periodic()) {
    // One combined period past the longer of the two preperiods covers every
    // (block position, radix position) pair the tail will ever visit.
    const std::size_t window =
        std::max(px, spec.preperiod().size()) +
        std::lcm(p.block_.size(), spec.period().size());
    bool all_max = true;
    for (std::size_t n = px + 1; n <= window; ++n) {
      const int d = block_digit(n);
      const int j = spec.radix_at(n);
      if (d >= j) {
        throw UsageError("repeating block digit " + std::to_string(d) +
                         " exceeds radix " + std::to_string(j) +
                         " at position " + std::to_string(n));
      }
      if (d != j - 1) all_max = false;
    }
    // Canonicalize an everywhere-maximal block so the max tail has exactly
    // one representation.
    if (all_max) {
      p.tail_ = Tail::MaxDigit;
      p.block_.clear();
    }
  } else {
    // Radixes grow without bound, so bounds can fail only while j_n is at
    // most the largest block digit (and an all-max block is impossible).
    const int maxb = max_block_digit(p.block_);
    for (std::size_t n = px + 1; spec.radix_at(n) <= maxb; ++n) {
      const int d = block_digit(n);
      if (d >= spec.radix_at(n)) {
        throw UsageError("repeating block digit " + std::to_string(d) +
                         " exceeds radix " +
                         std::to_string(spec.radix_at(n)) + " at position " +
                         std::to_string(n));
      }
    }
  }
  return p;
}

AdicPoint AdicPoint::exact_max_tail(const RadixSpec& spec,
                                    std::vector<int> prefix) {
  AdicPoint p(spec);
  p.prefix_ = std::move(prefix);
  p.tail_ = Tail::MaxDigit;
  for (std::size_t i = 0; i < p.prefix_.size(); ++i) {
    const int j = spec.radix_at(i + 1);
    if (p.prefix_[i] < 0 || p.prefix_[i] >= j) {
      throw UsageError("digit " + std::to_string(p.prefix_[i]) +
                       " at position " + std::to_string(i + 1) +
                       " out of range [0, " + std::to_string(j) + ")");
    }
  }
  return p;
}

AdicPoint AdicPoint::zero(const RadixSpec& spec) {
  return exact(spec, {}, {0});
}

AdicPoint AdicPoint::from_residue(const RadixSpec& spec, const BigInt& r,
                                  std::size_t depth) {
  return exact(spec, residue_to_digits(spec, r, depth).digits, {0});
}

AdicPoint AdicPoint::sampled(const RadixSpec& spec, std::uint64_t seed) {
  AdicPoint p(spec);
  p.sampled_state_ = std::make_shared<SampledState>();
  p.sampled_state_->seed = seed;
  return p;
}

AdicPoint AdicPoint::parse(const RadixSpec& spec, std::string_view text) {
  constexpr std::string_view kSeed = "seed:";
  constexpr std::string_view kDigits = "digits:";
  if (text.substr(0, kSeed.size()) == kSeed) {
    const std::string rest{text.substr(kSeed.size())};
    try {
      std::size_t used = 0;
      const std::uint64_t seed = std::stoull(rest, &used);
      if (used != rest.size()) throw std::invalid_argument(rest);
      return sampled(spec, seed);
    } catch (const std::exception&) {
      throw UsageError("malformed seed in point '" + std::string(text) + "'");
    }
  }
  if (text.substr(0, kDigits.size()) == kDigits) {
    const std::string_view rest = text.substr(kDigits.size());
    const auto bar = rest.find('|');
    if (bar == std::string_view::npos) {
      // Shorthand: listed digits, then zeros.
      return exact(spec, parse_digit_list(rest), {0});
    }
    auto prefix = parse_digit_list(rest.substr(0, bar));
    const std::string_view tail = rest.substr(bar + 1);
    if (tail == "max") return exact_max_tail(spec, std::move(prefix));
    auto block = parse_digit_list(tail);
    if (block.empty()) {
      throw UsageError("point '" + std::string(text) +
                       "' has an empty repeating block");
    }
    return exact(spec, std::move(prefix), std::move(block));
  }
  throw UsageError("malformed point '" + std::string(text) +
                   "' (expected \"digits:...\" or \"seed:N\")");
}

std::string AdicPoint::to_string() const {
  if (is_sampled()) return "seed:" + std::to_string(sampled_state_->seed);
  std::string out = "digits:" + join_digits(prefix_) + "|";
  if (tail_ == Tail::MaxDigit) return out + "max";
  return out + join_digits(block_);
}

int AdicPoint::digit(std::size_t n) const {
  if (n == 0) throw UsageError("digit positions are 1-based");
  if (is_sampled()) {
    std::lock_guard<std::mutex> lock(sampled_state_->mu);
    auto& memo = sampled_state_->memo;
    while (memo.size() < n) {
      const std::size_t pos = memo.size() + 1;
      const auto j = static_cast<std::uint64_t>(spec_.radix_at(pos));
      memo.push_back(
          static_cast<int>(uniform_draw(sampled_state_->seed, 0, pos, j)));
    }
    return memo[n - 1];
  }
  if (n <= prefix_.size()) return prefix_[n - 1];
  if (tail_ == Tail::MaxDigit) return spec_.radix_at(n) - 1;
  return block_[(n - prefix_.size() - 1) % block_.size()];
}

BigInt AdicPoint::residue(std::size_t depth) const {
  BigInt value = 0;
  BigInt weight = 1;
  for (std::size_t n = 1; n <= depth; ++n) {
    value += weight * digit(n);
    weight *= spec_.radix_at(n);
  }
  return value;
}

std::uint64_t AdicPoint::seed() const {
  if (!is_sampled()) throw UsageError("seed() on an exact point");
  return sampled_state_->seed;
}

bool same_point(const AdicPoint& x, const AdicPoint& y) {
  if (!x.is_exact() || !y.is_exact()) {
    throw UsageError("same_point needs exact points");
  }
  check_same_spec(x.spec(), y.spec(), "same_point");
  return !first_difference(x, y).has_value();
}

bool contains(const Cylinder& c, const AdicPoint& x) {
  check_same_spec(c.spec, x.spec(), "contains");
  check_cylinder(c);
  return x.residue(c.depth) == c.residue;
}

bool cylinders_intersect(const Cylinder& a, const Cylinder& b) {
  check_same_spec(a.spec, b.spec, "cylinders_intersect");
  check_cylinder(a);
  check_cylinder(b);
  const Cylinder& shallow = a.depth <= b.depth ? a : b;
  const Cylinder& deep = a.depth <= b.depth ? b : a;
  return deep.residue % shallow.spec.modulus(shallow.depth) == shallow.residue;
}

Rational UltraDistance::value() const {
  switch (kind) {
    case Kind::Zero:
      return Rational(0);
    case Kind::PowerOfHalf: {
      BigInt den = 1;
      den <<= exponent;
      return Rational(1, den);
    }
    case Kind::IndeterminateBelow:
      break;
  }
  throw UsageError("indeterminate distance has no exact value");
}

UltraDistance distance(const AdicPoint& x, const AdicPoint& y,
                       std::size_t depth_cap) {
  check_same_spec(x.spec(), y.spec(), "distance");
  if (x.is_exact() && y.is_exact()) {
    auto diff = first_difference(x, y);
    if (!diff) return {UltraDistance::Kind::Zero, 0};
    return {UltraDistance::Kind::PowerOfHalf, *diff};
  }
  // Sampled digits are a pure function of the seed, so equal seeds mean
  // equal points.
  if (x.is_sampled() && y.is_sampled() && x.seed() == y.seed()) {
    return {UltraDistance::Kind::Zero, 0};
  }
  for (std::size_t n = 1; n <= depth_cap; ++n) {
    if (x.digit(n) != y.digit(n)) {
      return {UltraDistance::Kind::PowerOfHalf, n};
    }
  }
  return {UltraDistance::Kind::IndeterminateBelow, depth_cap};
}

AdicPoint translate(const AdicPoint& x, const BigInt& k) {
  if (!x.is_exact()) {
    throw UsageError(
        "translate requires an exact point; sampled points expose residues "
        "at finite depth only");
  }
  if (k == 0) return x;
  const RadixSpec& spec = x.spec();
  const BigInt magnitude = abs(k);

  // Depth past which the integer's own digits are exhausted.
  std::size_t base = 0;
  {
    BigInt m = 1;
    while (m <= magnitude) {
      ++base;
      m *= spec.radix_at(base);
    }
  }
  const std::vector<int> kdigits =
      residue_to_digits(spec, magnitude, base).digits;

  const std::size_t px = x.prefix().size();
  std::vector<int> out;
  out.reserve(base + 4);

  if (k > 0) {
    long long carry = 0;
    for (std::size_t i = 0; i < base; ++i) {
      const long long j = spec.radix_at(i + 1);
      const long long s = x.digit(i + 1) + kdigits[i] + carry;
      out.push_back(static_cast<int>(s % j));
      carry = s / j;
    }
    if (carry == 0) return splice(spec, std::move(out), tail_view_after(x, base));
    // Propagate the carry. It survives position n exactly when x_n is the
    // maximal digit j_n - 1. A window argument (or unbounded radix growth)
    // bounds how far we must look before declaring it permanent.
    std::size_t persist_bound;
    if (x.tail() == AdicPoint::Tail::MaxDigit) {
      persist_bound = std::max(base, px);
    } else if (spec.is_eventually_periodic()) {
      persist_bound = std::max({base, px, spec.preperiod().size()}) +
                      std::lcm(x.block().size(), spec.period().size());
    } else {
      // Block digits are bounded while radixes grow, so the carry must die;
      // no explicit bound is needed.
      persist_bound = SIZE_MAX;
    }
    for (std::size_t n = base + 1;; ++n) {
      if (n > persist_bound) {
        // Every remaining digit is maximal: the sum is zero from here on.
        return AdicPoint::exact(spec, std::move(out), {0});
      }
      const int d = x.digit(n);
      if (d == spec.radix_at(n) - 1) {
        out.push_back(0);
        continue;
      }
      out.push_back(d + 1);
      return splice(spec, std::move(out), tail_view_after(x, n));
    }
  }

  // k < 0: subtract with borrow. The borrow survives position n exactly when
  // x_n = 0; if the whole tail is zero it survives forever and the result has
  // the maximal-digit tail.
  long long borrow = 0;
  for (std::size_t i = 0; i < base; ++i) {
    const long long j = spec.radix_at(i + 1);
    long long d = x.digit(i + 1) - kdigits[i] - borrow;
    if (d < 0) {
      d += j;
      borrow = 1;
    } else {
      borrow = 0;
    }
    out.push_back(static_cast<int>(d));
  }
  if (borrow == 0) return splice(spec, std::move(out), tail_view_after(x, base));
  const bool zero_tail =
      x.tail() == AdicPoint::Tail::Periodic && all_zero(x.block());
  for (std::size_t n = base + 1;; ++n) {
    if (zero_tail && n > px) {
      // Only zeros remain: the borrow never dies and every further digit
      // of the result is maximal.
      return AdicPoint::exact_max_tail(spec, std::move(out));
    }
    const int d = x.digit(n);
    if (d == 0) {
      out.push_back(spec.radix_at(n) - 1);
      continue;
    }
    out.push_back(d - 1);
    return splice(spec, std::move(out), tail_view_after(x, n));
  }
}

std::size_t radius_to_depth(const Rational& rho) {
  if (rho <= 0) throw UsageError("ball radius must be positive");
  const BigInt num = numerator(rho);
  const BigInt den = denominator(rho);
  // Smallest L >= 0 with rho > 2^-(L+1), i.e. num * 2^(L+1) > den.
  std::size_t level = 0;
  BigInt scaled = num * 2;
  while (scaled <= den) {
    ++level;
    scaled <<= 1;
  }
  return level;
}

Cylinder ball_to_cylinder(const AdicPoint& center, const Rational& rho) {
  const std::size_t depth = radius_to_depth(rho);
  return Cylinder{center.spec(), depth, center.residue(depth)};
}

BigInt first_hit(const AdicPoint& x, const Cylinder& c) {
  check_same_spec(x.spec(), c.spec, "first_hit");
  check_cylinder(c);
  const BigInt m = c.spec.modulus(c.depth);
  return floor_mod(c.residue - x.residue(c.depth), m);
}

std::optional<BigInt> first_hit_bruteforce(const AdicPoint& x,
                                           const Cylinder& c,
                                           std::uint64_t horizon) {
  check_same_spec(x.spec(), c.spec, "first_hit_bruteforce");
  check_cylinder(c);
  const std::size_t depth = c.depth;
  const std::vector<int> target =
      residue_to_digits(c.spec, c.residue, depth).digits;
  std::vector<int> cur(depth);
  for (std::size_t n = 1; n <= depth; ++n) cur[n - 1] = x.digit(n);

  for (std::uint64_t step = 0;; ++step) {
    if (cur == target) return BigInt(step);
    if (step == horizon) return std::nullopt;
    // Digit-wise +1 with carry, the adding-machine map at this depth.
    for (std::size_t i = 0; i < depth; ++i) {
      if (++cur[i] < c.spec.radix_at(i + 1)) break;
      cur[i] = 0;
    }
  }
}

std::optional<BigInt> same_orbit(const AdicPoint& x, const AdicPoint& y) {
  if (!x.is_exact() || !y.is_exact()) {
    throw UsageError("same_orbit needs exact points");
  }
  check_same_spec(x.spec(), y.spec(), "same_orbit");
  const RadixSpec& spec = x.spec();
  const std::size_t px = x.prefix().size();
  const std::size_t py = y.prefix().size();
  const std::size_t d = std::max(px, py);
  const bool xmax = x.tail() == AdicPoint::Tail::MaxDigit;
  const bool ymax = y.tail() == AdicPoint::Tail::MaxDigit;

  // A max tail means the point is a negative integer translate of zero, and
  // an all-zero periodic tail a nonnegative one. Those cases are immediate.
  if (xmax && ymax) return y.residue(d) - x.residue(d);
  if (xmax) {
    if (!all_zero(y.block())) return std::nullopt;
    return y.residue(d) - (x.residue(d) - spec.modulus(d));
  }
  if (ymax) {
    if (!all_zero(x.block())) return std::nullopt;
    return (y.residue(d) - spec.modulus(d)) - x.residue(d);
  }

  // Both tails periodic. y lies on x's orbit iff the digit stream of y - x
  // (mixed-radix subtraction with borrow) is eventually all zero (then the
  // offset is the nonnegative integer carried by the remaining prefix) or
  // eventually all maximal (then it is that prefix value minus the modulus).
  //
  // Past a stabilization point S the inputs to the borrow recurrence repeat
  // with period P, and the borrow bit settles into that rhythm after at most
  // one extra period, so digits past S + P repeat with period at most 2P.
  // Checking one full 2P window past S + 2P therefore decides the tail.
  std::size_t stable, period;
  if (spec.is_eventually_periodic()) {
    stable = std::max({px, py, spec.preperiod().size()});
    period = std::lcm(std::lcm(x.block().size(), y.block().size()),
                      spec.period().size());
  } else {
    // Wait for the radixes to dominate every digit difference, so the
    // borrow recurrence and the all-zero / all-max predicates no longer
    // depend on the radix position.
    const int bound = max_block_digit(x.block()) + max_block_digit(y.block()) + 1;
    std::size_t n = std::max(px, py) + 1;
    while (spec.radix_at(n) <= bound + 1) ++n;
    stable = n;
    period = std::lcm(x.block().size(), y.block().size());
  }
  const std::size_t w1 = stable + 2 * period;
  const std::size_t w2 = w1 + 2 * period;

  int borrow = 0;
  BigInt value = 0;
  BigInt weight = 1;
  bool tail_zero = true;
  bool tail_max = true;
  for (std::size_t n = 1; n <= w2; ++n) {
    const int j = spec.radix_at(n);
    long long diff = static_cast<long long>(y.digit(n)) - x.digit(n) - borrow;
    if (diff < 0) {
      diff += j;
      borrow = 1;
    } else {
      borrow = 0;
    }
    if (n <= w1) {
      value += weight * diff;
      weight *= j;
    } else {
      if (diff != 0) tail_zero = false;
      if (diff != j - 1) tail_max = false;
    }
  }
  if (tail_zero) return value;
  if (tail_max) return value - spec.modulus(w1);
  return std::nullopt;
}

bool verify_cyclic_partition(const RadixSpec& spec, std::size_t depth) {
  const BigInt m_big = spec.modulus(depth);
  const int next_radix = spec.radix_at(depth + 1);
  if (m_big * next_radix > (BigInt(1) << 27)) {
    throw UsageError("verify_cyclic_partition: depth " + std::to_string(depth) +
                     " is too large to enumerate");
  }
  const auto m = m_big.convert_to<std::uint64_t>();
  const auto m_next = (m_big * next_radix).convert_to<std::uint64_t>();

  // (a) The +1 map advances every depth-`depth` cylinder to the next residue.
  for (std::uint64_t r = 0; r < m; ++r) {
    const AdicPoint rep = AdicPoint::from_residue(spec, BigInt(r), depth);
    const BigInt advanced = translate(rep, 1).residue(depth);
    if (advanced != BigInt((r + 1) % m)) return false;
  }

  // (b) Depth-(depth+1) cylinders refine each depth-`depth` cylinder into
  // exactly j_{depth+1} pieces (distinct residues at one depth are disjoint).
  std::vector<std::uint32_t> count(m, 0);
  for (std::uint64_t r = 0; r < m_next; ++r) {
    ++count[static_cast<std::size_t>(r % m)];
  }
  for (std::uint32_t c : count) {
    if (c != static_cast<std::uint32_t>(next_radix)) return false;
  }

  // Spot-check the containment map through the digit machinery as well.
  const std::uint64_t stride = std::max<std::uint64_t>(1, m_next / 512);
  for (std::uint64_t r = 0; r < m_next; r += stride) {
    const AdicPoint rep = AdicPoint::from_residue(spec, BigInt(r), depth + 1);
    if (rep.residue(depth) != BigInt(r % m)) return false;
  }
  return true;
}

}  // namespace odesc
