#include "fixlab/syntax.hpp"

#include <array>
#include <cctype>
#include <vector>

namespace fixlab {

ParseError::ParseError(std::size_t position, const std::string& message)
    : std::runtime_error("at offset " + std::to_string(position) + ": " + message), position_(position) {}

namespace {

Program assemble(Op op, std::array<Program, 3>& k);

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Program parse_all() {
    Program p = parse_expr();
    skip_space();
    if (pos_ != text_.size()) throw ParseError(pos_, "trailing input");
    return p;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view word() {
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ';') break;
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  Nat number(std::size_t at, std::string_view digits) {
    try {
      return parse_nat(digits);
    } catch (const std::invalid_argument&) {
      throw ParseError(at, "expected a natural number, got '" + std::string(digits) + "'");
    }
  }

  Program atom(std::size_t at, std::string_view w) {
    if (w.empty()) throw ParseError(at, "expected a program");
    if (w[0] == '#') return decode(number(at + 1, w.substr(1)));
    if (w == "loop") return build::loop();
    for (unsigned i = 0; i < kNullaryOps; ++i) {
      const auto op = static_cast<Op>(i);
      if (w == op_name(op)) return decode(Nat(i));
    }
    throw ParseError(at, "unknown atom '" + std::string(w) + "'");
  }

  Program parse_expr() {
    skip_space();
    const std::size_t at = pos_;
    if (pos_ >= text_.size()) throw ParseError(pos_, "unexpected end of input");
    if (text_[pos_] == ')') throw ParseError(pos_, "unexpected ')'");
    if (text_[pos_] != '(') return atom(at, word());

    ++pos_;
    skip_space();
    const std::size_t head_at = pos_;
    const std::string_view head = word();
    Program result;
    if (head == "const") {
      skip_space();
      const std::size_t num_at = pos_;
      result = build::konst(number(num_at, word()));
    } else {
      const Op* found = nullptr;
      static constexpr std::array<Op, kOpCount> kAll{Op::Id,    Op::Succ,  Op::Left,  Op::Right, Op::Query,
                                                     Op::Mk,    Op::Const, Op::Comp,  Op::PairOf, Op::Add,
                                                     Op::Monus, Op::Apply, Op::Mu,    Op::Cases, Op::Clock};
      for (const Op& op : kAll) {
        if (op != Op::Const && head == op_name(op)) found = &op;
      }
      if (head == "loop") {
        result = build::loop();
      } else if (!found) {
        throw ParseError(head_at, "unknown constructor '" + std::string(head) + "'");
      } else if (arity(*found) == 0) {
        result = decode(Nat(static_cast<unsigned>(*found)));
      } else {
        std::array<Program, 3> kids;
        for (unsigned i = 0; i < arity(*found); ++i) kids[i] = parse_expr();
        result = assemble(*found, kids);
      }
    }
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != ')') throw ParseError(pos_, "expected ')'");
    ++pos_;
    return result;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

Program assemble(Op op, std::array<Program, 3>& k) {
  switch (op) {
    case Op::Comp: return build::comp(k[0], k[1]);
    case Op::PairOf: return build::pair_of(k[0], k[1]);
    case Op::Add: return build::add(k[0], k[1]);
    case Op::Monus: return build::monus(k[0], k[1]);
    case Op::Apply: return build::apply(k[0], k[1]);
    case Op::Mu: return build::mu(k[0]);
    case Op::Cases: return build::cases(k[0], k[1], k[2]);
    default: return build::clock(k[0], k[1], k[2]);
  }
}

void print_into(const Program& p, std::string& out) {
  const unsigned n = arity(p->op);
  if (p->op == Op::Const) {
    out += "(const ";
    out += to_string(p->constant);
    out += ')';
    return;
  }
  if (n == 0) {
    out += op_name(p->op);
    return;
  }
  out += '(';
  out += op_name(p->op);
  for (unsigned i = 0; i < n; ++i) {
    out += ' ';
    print_into(p->kids[i], out);
  }
  out += ')';
}

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).parse_all(); }

std::string print_program(const Program& p) {
  std::string out;
  print_into(p, out);
  return out;
}

}  // namespace fixlab
