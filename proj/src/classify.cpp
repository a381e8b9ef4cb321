#include "odesc/classify.hpp"

#include <vector>

namespace odesc {

namespace {

// Prime factor multiplicities of a small integer by trial division.
std::vector<std::pair<long long, std::uint64_t>> factorize(long long n) {
  std::vector<std::pair<long long, std::uint64_t>> out;
  for (long long p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    std::uint64_t e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

long long next_prime_after(long long n) {
  auto is_prime = [](long long v) {
    if (v < 2) return false;
    for (long long p = 2; p * p <= v; ++p) {
      if (v % p == 0) return false;
    }
    return true;
  };
  long long v = n + 1;
  while (!is_prime(v)) ++v;
  return v;
}

// Smallest prime where the two profiles disagree. Callable only when they
// do disagree somewhere; every branch below terminates because a Tabulated
// profile is zero outside its finite support while AllOnes / AllInfinite
// never are.
long long smallest_witness(const ConjugacyInvariant& a,
                           const ConjugacyInvariant& b) {
  for (long long p = 2;; p = next_prime_after(p)) {
    if (a.at(p) != b.at(p)) return p;
  }
}

}  // namespace

std::string to_string(const PrimeCount& c) {
  return c.infinite ? "inf" : std::to_string(c.count);
}

ConjugacyInvariant ConjugacyInvariant::of(const RadixSpec& spec) {
  ConjugacyInvariant inv;
  switch (spec.family()) {
    case RadixSpec::Family::Factorial:
      inv.kind_ = Kind::AllInfinite;
      return inv;
    case RadixSpec::Family::NthPrime:
      // The radixes enumerate each prime exactly once.
      inv.kind_ = Kind::AllOnes;
      return inv;
    case RadixSpec::Family::EventuallyPeriodic:
      break;
  }
  inv.kind_ = Kind::Tabulated;
  for (int j : spec.preperiod()) {
    for (auto [p, e] : factorize(j)) {
      auto& cell = inv.table_[p];
      if (!cell.infinite) cell.count += e;
    }
  }
  // A prime dividing any period entry recurs forever.
  for (int j : spec.period()) {
    for (auto [p, e] : factorize(j)) {
      (void)e;
      inv.table_[p] = PrimeCount::inf();
    }
  }
  return inv;
}

PrimeCount ConjugacyInvariant::at(long long prime) const {
  switch (kind_) {
    case Kind::AllOnes:
      return PrimeCount::finite(1);
    case Kind::AllInfinite:
      return PrimeCount::inf();
    case Kind::Tabulated:
      break;
  }
  auto it = table_.find(prime);
  return it == table_.end() ? PrimeCount::finite(0) : it->second;
}

std::string ConjugacyInvariant::to_string() const {
  switch (kind_) {
    case Kind::AllOnes:
      return "every prime once";
    case Kind::AllInfinite:
      return "every prime infinitely often";
    case Kind::Tabulated:
      break;
  }
  std::string out = "{";
  bool first = true;
  for (const auto& [p, c] : table_) {
    if (!first) out += ", ";
    first = false;
    out += std::to_string(p) + ":" + odesc::to_string(c);
  }
  return out + "}";
}

bool ConjugacyInvariant::operator==(const ConjugacyInvariant& o) const {
  if (kind_ != o.kind_) return false;
  if (kind_ != Kind::Tabulated) return true;
  return table_ == o.table_;
}

ConjugacyResult conjugacy(const RadixSpec& a, const RadixSpec& b) {
  const auto ia = ConjugacyInvariant::of(a);
  const auto ib = ConjugacyInvariant::of(b);
  if (ia == ib) return {true, std::nullopt};
  return {false, smallest_witness(ia, ib)};
}

bool is_infinity_adic(const RadixSpec& spec) {
  return ConjugacyInvariant::of(spec).kind() ==
         ConjugacyInvariant::Kind::AllInfinite;
}

}  // namespace odesc
