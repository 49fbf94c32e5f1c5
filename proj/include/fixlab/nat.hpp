#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

namespace fixlab {

/// Arbitrary-precision natural number. Codes of programs built by the
/// recursion-theorem constructions routinely exceed 64 bits.
using Nat = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;

/// Step budgets and stage numbers.
using Steps = std::uint64_t;

/// Cantor pairing: pair(x, y) = (x + y)(x + y + 1) / 2 + y.
Nat pair(const Nat& x, const Nat& y);
std::pair<Nat, Nat> unpair(const Nat& z);

/// Triples are left-nested: <x, y, z> = pair(x, pair(y, z)).
Nat triple(const Nat& x, const Nat& y, const Nat& z);
std::tuple<Nat, Nat, Nat> untriple(const Nat& t);

/// Length-additive bijection N x N -> N used inside the Godel numbering.
/// Pairs are ranked by the total length of their bijective-binary
/// representations, so |join(a, b)| is about |a| + |b| + log(|a| + |b|)
/// bits. Cantor pairing would double the size at every nesting level.
Nat join(const Nat& a, const Nat& b);
std::pair<Nat, Nat> split(const Nat& r);

std::string to_string(const Nat& n);

/// Parses a decimal natural. Throws std::invalid_argument on anything else.
Nat parse_nat(std::string_view text);

/// Saturating conversion to a step count.
Steps to_steps(const Nat& n);

}  // namespace fixlab
