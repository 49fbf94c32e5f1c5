#include "fixlab/program.hpp"

#include <map>
#include <stdexcept>
#include <vector>

namespace fixlab {

namespace {

constexpr std::size_t kDecodeCacheLimit = 1u << 14;

unsigned payload_tag(Op op) { return static_cast<unsigned>(op) - kNullaryOps; }

Program make_node(Op op, Nat constant, std::array<Program, 3> kids) {
  const unsigned n = arity(op);
  std::array<Nat, 3> codes;
  for (unsigned i = 0; i < n; ++i) {
    if (!kids[i]) throw std::invalid_argument("missing child program");
    codes[i] = kids[i]->code;
  }
  Nat code = op == Op::Const ? const_code(constant) : node_code(op, std::span<const Nat>(codes.data(), n));
  return std::make_shared<const Node>(Node{op, std::move(constant), std::move(kids), std::move(code)});
}

}  // namespace

unsigned arity(Op op) {
  switch (op) {
    case Op::Comp:
    case Op::PairOf:
    case Op::Add:
    case Op::Monus:
    case Op::Apply:
      return 2;
    case Op::Mu:
      return 1;
    case Op::Cases:
    case Op::Clock:
      return 3;
    default:
      return 0;
  }
}

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Id: return "id";
    case Op::Succ: return "succ";
    case Op::Left: return "left";
    case Op::Right: return "right";
    case Op::Query: return "query";
    case Op::Mk: return "mk";
    case Op::Const: return "const";
    case Op::Comp: return "comp";
    case Op::PairOf: return "pair";
    case Op::Add: return "add";
    case Op::Monus: return "monus";
    case Op::Apply: return "apply";
    case Op::Mu: return "mu";
    case Op::Cases: return "cases";
    case Op::Clock: return "clock";
  }
  return "?";
}

Nat node_code(Op op, std::span<const Nat> kid_codes) {
  const auto index = static_cast<unsigned>(op);
  if (index < kNullaryOps) return Nat(index);
  if (op == Op::Const) {
    if (kid_codes.size() != 1) throw std::invalid_argument("const takes one natural");
    return const_code(kid_codes[0]);
  }
  if (kid_codes.size() != arity(op)) throw std::invalid_argument("wrong number of child codes");
  Nat payload;
  switch (arity(op)) {
    case 1: payload = kid_codes[0]; break;
    case 2: payload = join(kid_codes[0], kid_codes[1]); break;
    default: payload = join(kid_codes[0], join(kid_codes[1], kid_codes[2])); break;
  }
  return kNullaryOps + payload_tag(op) + kPayloadOps * payload;
}

Nat const_code(const Nat& k) { return kNullaryOps + payload_tag(Op::Const) + kPayloadOps * k; }

Nat encode(const Program& p) { return p->code; }

Program decode(const Nat& code) {
  if (code < kNullaryOps) {
    const auto op = static_cast<Op>(static_cast<unsigned>(code));
    return make_node(op, 0, {});
  }
  const Nat shifted = code - kNullaryOps;
  const auto tag = static_cast<unsigned>(shifted % kPayloadOps);
  const Nat payload = shifted / kPayloadOps;
  const auto op = static_cast<Op>(tag + kNullaryOps);
  if (op == Op::Const) return make_node(op, payload, {});
  std::array<Program, 3> kids;
  switch (arity(op)) {
    case 1:
      kids[0] = decode(payload);
      break;
    case 2: {
      auto [a, b] = split(payload);
      kids[0] = decode(a);
      kids[1] = decode(b);
      break;
    }
    default: {
      auto [a, rest] = split(payload);
      auto [b, c] = split(rest);
      kids[0] = decode(a);
      kids[1] = decode(b);
      kids[2] = decode(c);
      break;
    }
  }
  return make_node(op, 0, std::move(kids));
}

Program decode_cached(const Nat& code) {
  thread_local std::map<Nat, Program> cache;
  if (auto it = cache.find(code); it != cache.end()) return it->second;
  if (cache.size() >= kDecodeCacheLimit) cache.clear();
  Program p = decode(code);
  cache.emplace(code, p);
  return p;
}

Nat mk(const Nat& x) {
  auto [t, payload] = unpair(x);
  const auto op = static_cast<Op>(static_cast<unsigned>(t % kOpCount));
  switch (arity(op)) {
    case 0:
      if (op == Op::Const) return const_code(payload);
      return Nat(static_cast<unsigned>(op));
    case 1:
      return node_code(op, std::span<const Nat>(&payload, 1));
    case 2: {
      auto [a, b] = unpair(payload);
      const std::array<Nat, 2> codes{std::move(a), std::move(b)};
      return node_code(op, codes);
    }
    default: {
      auto [a, rest] = unpair(payload);
      auto [b, c] = unpair(rest);
      const std::array<Nat, 3> codes{std::move(a), std::move(b), std::move(c)};
      return node_code(op, codes);
    }
  }
}

bool structurally_equal(const Program& a, const Program& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->code == b->code;
}

std::size_t node_count(const Program& p) {
  std::size_t count = 1;
  for (unsigned i = 0; i < arity(p->op); ++i) count += node_count(p->kids[i]);
  return count;
}

namespace build {

Program id() { return make_node(Op::Id, 0, {}); }
Program succ() { return make_node(Op::Succ, 0, {}); }
Program left() { return make_node(Op::Left, 0, {}); }
Program right() { return make_node(Op::Right, 0, {}); }
Program query() { return make_node(Op::Query, 0, {}); }
Program mk() { return make_node(Op::Mk, 0, {}); }
Program konst(const Nat& k) { return make_node(Op::Const, k, {}); }
Program comp(Program f, Program g) { return make_node(Op::Comp, 0, {std::move(f), std::move(g), nullptr}); }
Program pair_of(Program f, Program g) { return make_node(Op::PairOf, 0, {std::move(f), std::move(g), nullptr}); }
Program add(Program f, Program g) { return make_node(Op::Add, 0, {std::move(f), std::move(g), nullptr}); }
Program monus(Program f, Program g) { return make_node(Op::Monus, 0, {std::move(f), std::move(g), nullptr}); }
Program apply(Program code, Program arg) {
  return make_node(Op::Apply, 0, {std::move(code), std::move(arg), nullptr});
}
Program mu(Program f) { return make_node(Op::Mu, 0, {std::move(f), nullptr, nullptr}); }
Program cases(Program test, Program zero, Program nonzero) {
  return make_node(Op::Cases, 0, {std::move(test), std::move(zero), std::move(nonzero)});
}
Program clock(Program code, Program arg, Program budget) {
  return make_node(Op::Clock, 0, {std::move(code), std::move(arg), std::move(budget)});
}

Program loop() { return mu(konst(1)); }

Program canonical_nonempty() { return cases(id(), konst(0), loop()); }

Program differ(Program f, Program g) { return add(monus(f, g), monus(g, f)); }

Program quote(Op op, Program payload) {
  return comp(mk(), pair_of(konst(static_cast<unsigned>(op)), std::move(payload)));
}

Program quote_const(Program value) { return quote(Op::Const, std::move(value)); }

Program quote_binary(Op op, Program a, Program b) { return quote(op, pair_of(std::move(a), std::move(b))); }

Program quote_smn(Program code, Program fixed) {
  // comp(E, pair(const X, id)); the code of id is 0.
  return quote_binary(Op::Comp, std::move(code),
                      quote_binary(Op::PairOf, quote_const(std::move(fixed)), konst(0)));
}

}  // namespace build

Nat loop_code() { return build::loop()->code; }

Nat canonical_nonempty_code() { return build::canonical_nonempty()->code; }

}  // namespace fixlab
