#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fixlab/program.hpp"

namespace fixlab {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& message);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Surface syntax:
//   id | succ | left | right | query | mk | loop
//   (const N) | (comp F G) | (pair F G) | (add F G) | (monus F G)
//   (apply C A) | (mu F) | (cases T Z N) | (clock C A B)
//   #N            the program with code N
// `;` starts a comment running to the end of the line. `loop` is shorthand
// for (mu (const 1)).
Program parse_program(std::string_view text);

/// Canonical text; parse_program(print_program(p)) has the same code as p.
std::string print_program(const Program& p);

}  // namespace fixlab
