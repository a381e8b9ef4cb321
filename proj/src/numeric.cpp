#include "odesc/numeric.hpp"

#include <cstdlib>

namespace odesc {

BigInt floor_mod(const BigInt& a, const BigInt& m) {
  if (m <= 0) throw UsageError("floor_mod: modulus must be positive");
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

Rational parse_rational(std::string_view text) {
  auto bad = [&] {
    return UsageError("malformed rational '" + std::string(text) +
                      "' (expected \"p\" or \"p/q\")");
  };
  if (text.empty()) throw bad();
  std::string s(text);
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(s));
    if (slash == 0 || slash + 1 >= s.size()) throw bad();
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw UsageError("malformed rational '" + std::string(text) +
                                   "': zero denominator");
    return Rational(num, den);
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw bad();
  }
}

std::string rational_to_string(const Rational& r) {
  const BigInt num = numerator(r);
  const BigInt den = denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter) {
  return mix64(seed ^ mix64(counter + 0x632be59bd9b4e019ULL));
}

std::uint64_t uniform_draw(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t index, std::uint64_t bound) {
  if (bound == 0) throw UsageError("uniform_draw: bound must be positive");
  // Accept only draws below the largest multiple of bound to avoid modulo bias.
  const std::uint64_t threshold = (UINT64_MAX / bound) * bound;
  std::uint64_t key = mix64(seed) ^ mix64(stream + 0x9e3779b97f4a7c15ULL);
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::uint64_t h = mix64(key ^ mix64(index + (attempt << 32)));
    if (h < threshold) return h % bound;
  }
}

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("ODESC_LOG");
    if (env == nullptr || *env == '\0') return 0;
    return std::atoi(env);
  }();
  return level;
}

}  // namespace odesc
