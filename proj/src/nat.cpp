#include "fixlab/nat.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace fixlab {

namespace {

std::size_t bit_length(const Nat& n) {
  return n == 0 ? 0 : static_cast<std::size_t>(boost::multiprecision::msb(n)) + 1;
}

Nat pow2(std::size_t k) {
  Nat one = 1;
  return one << k;
}

// Number of (u, v) string pairs with |u| + |v| < total.
Nat pairs_below(std::size_t total) {
  if (total == 0) return 0;
  return Nat(total - 1) * pow2(total) + 1;
}

// n <-> binary string of length len(n), bijective base 2.
std::size_t string_length(const Nat& n) { return bit_length(n + 1) - 1; }

std::uint64_t isqrt64(std::uint64_t v) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(v)));
  while (r > 0 && static_cast<unsigned __int128>(r) * r > v) --r;
  while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= v) ++r;
  return r;
}

// Floor square root. Newton from an upper bound taken off the top 64 bits.
Nat isqrt(const Nat& n) {
  if (n <= std::numeric_limits<std::uint64_t>::max()) return isqrt64(n.convert_to<std::uint64_t>());
  std::size_t shift = bit_length(n) - 64;
  shift += shift & 1;
  Nat x = Nat(isqrt64((n >> shift).convert_to<std::uint64_t>()) + 1) << (shift / 2);
  for (;;) {
    Nat y = (x + n / x) >> 1;
    if (y >= x) return x;
    x = std::move(y);
  }
}

struct NatHash {
  std::size_t operator()(const Nat& n) const {
    const auto& b = n.backend();
    std::size_t h = b.size();
    for (std::size_t i = 0; i < b.size(); ++i) h = h * 1099511628211ULL ^ b.limbs()[i];
    return h;
  }
};

std::pair<Nat, Nat> unpair_uncached(const Nat& z) {
  Nat w = (isqrt(8 * z + 1) - 1) / 2;
  Nat t = w * (w + 1) / 2;
  Nat y = z - t;
  return {w - y, y};
}

}  // namespace

Nat pair(const Nat& x, const Nat& y) {
  Nat s = x + y;
  return s * (s + 1) / 2 + y;
}

std::pair<Nat, Nat> unpair(const Nat& z) {
  if (z.backend().size() <= 2) return unpair_uncached(z);
  // Self-referential programs take apart the same large codes over and over.
  thread_local std::unordered_map<Nat, std::pair<Nat, Nat>, NatHash> memo;
  if (auto it = memo.find(z); it != memo.end()) return it->second;
  if (memo.size() >= 4096) memo.clear();
  auto result = unpair_uncached(z);
  memo.emplace(z, result);
  return result;
}

Nat triple(const Nat& x, const Nat& y, const Nat& z) { return pair(x, pair(y, z)); }

std::tuple<Nat, Nat, Nat> untriple(const Nat& t) {
  auto [x, rest] = unpair(t);
  auto [y, z] = unpair(rest);
  return {std::move(x), std::move(y), std::move(z)};
}

Nat join(const Nat& a, const Nat& b) {
  const std::size_t i = string_length(a);
  const std::size_t j = string_length(b);
  const std::size_t total = i + j;
  Nat va = a + 1 - pow2(i);
  Nat vb = b + 1 - pow2(j);
  return pairs_below(total) + (Nat(i) << total) + (va << j) + vb;
}

std::pair<Nat, Nat> split(const Nat& r) {
  // pairs_below(L) ~ L * 2^L, so L sits a little under bit_length(r).
  const std::size_t bits = bit_length(r);
  std::size_t total = 0;
  if (bits > 2) {
    const std::size_t slack = bit_length(Nat(bits)) + 2;
    total = bits > slack ? bits - slack : 0;
  }
  while (pairs_below(total) > r) --total;
  while (pairs_below(total + 1) <= r) ++total;

  Nat off = r - pairs_below(total);
  const std::size_t i = static_cast<std::size_t>(off >> total);
  Nat rest = off & (pow2(total) - 1);
  const std::size_t j = total - i;
  Nat va = rest >> j;
  Nat vb = rest & (pow2(j) - 1);
  return {va + pow2(i) - 1, vb + pow2(j) - 1};
}

std::string to_string(const Nat& n) { return n.str(); }

Nat parse_nat(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty number");
  for (char c : text) {
    if (c < '0' || c > '9') throw std::invalid_argument("not a natural number: " + std::string(text));
  }
  return Nat(std::string(text));
}

Steps to_steps(const Nat& n) {
  constexpr Steps kMax = std::numeric_limits<Steps>::max();
  if (n > kMax) return kMax;
  return static_cast<Steps>(n);
}

}  // namespace fixlab
