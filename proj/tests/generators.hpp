#pragma once

#include <random>

#include "fixlab/program.hpp"

namespace fixlab::testing {

// Random programs for property tests. Constants stay small and depth is
// bounded so that most samples are cheap to run.
inline Program random_program(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 6 : 14);
  const int choice = pick(rng);
  auto sub = [&] { return random_program(rng, depth - 1); };
  switch (choice) {
    case 0: return build::id();
    case 1: return build::succ();
    case 2: return build::left();
    case 3: return build::right();
    case 4: return build::query();
    case 5: return build::mk();
    case 6: return build::konst(std::uniform_int_distribution<int>(0, 12)(rng));
    case 7: return build::comp(sub(), sub());
    case 8: return build::pair_of(sub(), sub());
    case 9: return build::add(sub(), sub());
    case 10: return build::monus(sub(), sub());
    case 11: return build::apply(sub(), sub());
    case 12: return build::mu(sub());
    case 13: return build::cases(sub(), sub(), sub());
    default: return build::clock(sub(), sub(), build::konst(std::uniform_int_distribution<int>(0, 40)(rng)));
  }
}

inline Nat random_code(std::mt19937_64& rng) {
  // Mix of raw small indices and structured programs.
  if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
    return Nat(std::uniform_int_distribution<int>(0, 5000)(rng));
  }
  return random_program(rng, 3)->code;
}

}  // namespace fixlab::testing
