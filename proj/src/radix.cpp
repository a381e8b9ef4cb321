#include "odesc/radix.hpp"

#include <algorithm>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>

namespace odesc {

namespace {

// Growing prime table shared by every RadixSpec::nth_prime() instance.
// Guarded by a mutex so concurrent readers are safe.
int nth_prime_value(std::size_t n) {
  static std::vector<int> primes = {2, 3, 5, 7, 11, 13};
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  while (primes.size() < n) {
    int candidate = primes.back() + 2;
    for (;; candidate += 2) {
      bool composite = false;
      for (int p : primes) {
        if (static_cast<long long>(p) * p > candidate) break;
        if (candidate % p == 0) {
          composite = true;
          break;
        }
      }
      if (!composite) break;
    }
    primes.push_back(candidate);
  }
  return primes[n - 1];
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      long v = std::stol(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      if (v < 2 || v > std::numeric_limits<int>::max()) {
        throw UsageError("radix entry " + item + " out of range (need >= 2)");
      }
      out.push_back(static_cast<int>(v));
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception&) {
      throw UsageError("malformed radix entry '" + item + "'");
    }
  }
  return out;
}

std::string join_ints(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

}  // namespace

RadixSpec::RadixSpec(Family family, std::vector<int> preperiod,
                     std::vector<int> period)
    : family_(family),
      preperiod_(std::move(preperiod)),
      period_(std::move(period)) {}

RadixSpec RadixSpec::constant(int j) {
  return eventually_periodic({}, {j});
}

RadixSpec RadixSpec::eventually_periodic(std::vector<int> preperiod,
                                         std::vector<int> period) {
  if (period.empty()) {
    throw UsageError("radix spec needs a nonempty period block");
  }
  for (int j : preperiod) {
    if (j < 2) throw UsageError("radix entries must be >= 2");
  }
  for (int j : period) {
    if (j < 2) throw UsageError("radix entries must be >= 2");
  }
  return RadixSpec(Family::EventuallyPeriodic, std::move(preperiod),
                   std::move(period));
}

RadixSpec RadixSpec::factorial() {
  return RadixSpec(Family::Factorial, {}, {});
}

RadixSpec RadixSpec::nth_prime() {
  return RadixSpec(Family::NthPrime, {}, {});
}

RadixSpec RadixSpec::parse(std::string_view text) {
  if (text == "factorial") return factorial();
  if (text == "primes") return nth_prime();
  if (text.empty()) throw UsageError("empty radix spec");
  auto bar = text.find('|');
  if (bar == std::string_view::npos) {
    return eventually_periodic({}, parse_int_list(text));
  }
  std::vector<int> pre =
      bar == 0 ? std::vector<int>{} : parse_int_list(text.substr(0, bar));
  std::vector<int> per = parse_int_list(text.substr(bar + 1));
  if (per.empty()) {
    throw UsageError("radix spec '" + std::string(text) +
                     "' has an empty period block");
  }
  return eventually_periodic(std::move(pre), std::move(per));
}

std::string RadixSpec::to_string() const {
  switch (family_) {
    case Family::Factorial:
      return "factorial";
    case Family::NthPrime:
      return "primes";
    case Family::EventuallyPeriodic:
      break;
  }
  if (preperiod_.empty()) return join_ints(period_);
  return join_ints(preperiod_) + "|" + join_ints(period_);
}

int RadixSpec::radix_at(std::size_t n) const {
  if (n == 0) throw UsageError("radix positions are 1-based");
  switch (family_) {
    case Family::Factorial: {
      if (n >= static_cast<std::size_t>(std::numeric_limits<int>::max())) {
        throw UsageError("factorial radix position too large");
      }
      return static_cast<int>(n) + 1;
    }
    case Family::NthPrime:
      return nth_prime_value(n);
    case Family::EventuallyPeriodic:
      break;
  }
  if (n <= preperiod_.size()) return preperiod_[n - 1];
  return period_[(n - preperiod_.size() - 1) % period_.size()];
}

BigInt RadixSpec::modulus(std::size_t depth) const {
  BigInt m = 1;
  for (std::size_t n = 1; n <= depth; ++n) m *= radix_at(n);
  return m;
}

bool operator==(const RadixSpec& a, const RadixSpec& b) {
  // Distinct families never coincide: a builtin family is unbounded while an
  // eventually periodic sequence is bounded, and factorial/primes differ at
  // position 3 (4 vs 5).
  if (a.family_ != b.family_) return false;
  if (a.family_ != RadixSpec::Family::EventuallyPeriodic) return true;
  // Two eventually periodic sequences agree everywhere iff they agree through
  // the longer preperiod plus one least-common-multiple of the periods.
  const std::size_t s = std::max(a.preperiod_.size(), b.preperiod_.size());
  const std::size_t p = std::lcm(a.period_.size(), b.period_.size());
  for (std::size_t n = 1; n <= s + p; ++n) {
    if (a.radix_at(n) != b.radix_at(n)) return false;
  }
  return true;
}

DigitVector make_digits(const RadixSpec& spec, std::vector<int> digits) {
  for (std::size_t i = 0; i < digits.size(); ++i) {
    const int j = spec.radix_at(i + 1);
    if (digits[i] < 0 || digits[i] >= j) {
      throw UsageError("digit " + std::to_string(digits[i]) + " at position " +
                       std::to_string(i + 1) + " out of range [0, " +
                       std::to_string(j) + ")");
    }
  }
  return DigitVector{spec, std::move(digits)};
}

DigitVector add_digits(const DigitVector& xs, const DigitVector& ys) {
  if (xs.spec != ys.spec) {
    throw UsageError("add_digits: operands use different radix specs");
  }
  if (xs.depth() != ys.depth()) {
    throw UsageError("add_digits: operands have different depths");
  }
  std::vector<int> out(xs.depth());
  long long carry = 0;
  for (std::size_t i = 0; i < xs.depth(); ++i) {
    const long long j = xs.spec.radix_at(i + 1);
    const long long s = xs.digits[i] + ys.digits[i] + carry;
    out[i] = static_cast<int>(s % j);
    carry = s / j;
  }
  return DigitVector{xs.spec, std::move(out)};
}

BigInt digits_to_residue(const DigitVector& xs) {
  BigInt value = 0;
  BigInt weight = 1;
  for (std::size_t i = 0; i < xs.depth(); ++i) {
    value += weight * xs.digits[i];
    weight *= xs.spec.radix_at(i + 1);
  }
  return value;
}

DigitVector residue_to_digits(const RadixSpec& spec, const BigInt& r,
                              std::size_t depth) {
  if (r < 0 || r >= spec.modulus(depth)) {
    throw UsageError("residue " + r.str() + " out of range for depth " +
                     std::to_string(depth));
  }
  std::vector<int> out(depth);
  BigInt rest = r;
  for (std::size_t i = 0; i < depth; ++i) {
    const int j = spec.radix_at(i + 1);
    out[i] = static_cast<int>(rest % j);
    rest /= j;
  }
  return DigitVector{spec, std::move(out)};
}

}  // namespace odesc
