#pragma once

#include <array>
#include <memory>
#include <span>
#include <string_view>

#include "fixlab/nat.hpp"

namespace fixlab {

// Constructors of the object language. The enum value doubles as the tag
// understood by the `mk` primitive.
//
//   id, succ, left, right     x, x+1, unpair(x).first, unpair(x).second
//   query                     oracle bit at position x (0 without an oracle)
//   mk                        Godel code of the node described by x = <tag, payload>
//   const k                   k
//   comp f g                  f(g(x))
//   pair f g                  <f(x), g(x)>
//   add f g, monus f g        f(x) + g(x), max(f(x) - g(x), 0)
//   apply c a                 phi_{c(x)}(a(x))
//   mu f                      least y with f(<x, y>) = 0
//   cases t z n               z(x) if t(x) = 0 else n(x)
//   clock c a b               0 if phi_{c(x)}(a(x)) needs more than b(x) steps, else value + 1
enum class Op : std::uint8_t {
  Id,
  Succ,
  Left,
  Right,
  Query,
  Mk,
  Const,
  Comp,
  PairOf,
  Add,
  Monus,
  Apply,
  Mu,
  Cases,
  Clock,
};

inline constexpr unsigned kNullaryOps = 6;
inline constexpr unsigned kPayloadOps = 9;
inline constexpr unsigned kOpCount = kNullaryOps + kPayloadOps;

/// Number of child programs; Const carries a natural instead.
unsigned arity(Op op);
std::string_view op_name(Op op);

struct Node;
using Program = std::shared_ptr<const Node>;

/// Immutable AST node. The Godel code is computed once at construction.
struct Node {
  Op op;
  Nat constant;
  std::array<Program, 3> kids;
  Nat code;
};

/// Code of a node given its children's codes (or the constant for Const).
/// Never decodes; cost is linear in the size of the codes involved.
Nat node_code(Op op, std::span<const Nat> kid_codes);
Nat const_code(const Nat& k);

Nat encode(const Program& p);
Program decode(const Nat& code);

/// decode() backed by a per-thread cache; used by the evaluator.
Program decode_cached(const Nat& code);

/// The `mk` primitive: x = <tag, payload>, tag taken mod kOpCount.
/// Payload is the constant for Const, the child code for unary nodes,
/// <c1, c2> for binary and <c1, <c2, c3>> for ternary. Ignored for nullary.
Nat mk(const Nat& x);

bool structurally_equal(const Program& a, const Program& b);
std::size_t node_count(const Program& p);

namespace build {

Program id();
Program succ();
Program left();
Program right();
Program query();
Program mk();
Program konst(const Nat& k);
Program comp(Program f, Program g);
Program pair_of(Program f, Program g);
Program add(Program f, Program g);
Program monus(Program f, Program g);
Program apply(Program code, Program arg);
Program mu(Program f);
Program cases(Program test, Program zero, Program nonzero);
Program clock(Program code, Program arg, Program budget);

/// mu y. [1 = 0]; never converges.
Program loop();
/// Converges exactly on input 0.
Program canonical_nonempty();
/// 0 iff f(x) = g(x).
Program differ(Program f, Program g);

// Program fragments that compute codes at run time. Each returns a program
// whose value on x is the code of the described node.
Program quote(Op op, Program payload);
Program quote_const(Program value);
Program quote_binary(Op op, Program a, Program b);
/// Value on x: code of smn(E(x), X(x)).
Program quote_smn(Program code, Program fixed);

}  // namespace build

/// Code of loop().
Nat loop_code();
/// Code of canonical_nonempty().
Nat canonical_nonempty_code();

}  // namespace fixlab
