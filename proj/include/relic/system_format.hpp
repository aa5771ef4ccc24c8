#pragma once

// Line-oriented text form for small hand-written systems:
//
//   latches x0 x1 x
//   inputs  i
//   init    x0            # one clause per line, `!` negates
//   init    !x1
//   next x0 = !x0
//   next x  = x0 | (x1 & !i)
//   property x
//
// Next-state expressions use ! & ^ | (tightest first), parentheses and the
// constants 0 and 1. Every latch needs exactly one `next` line.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "relic/aiger.hpp"
#include "relic/logic.hpp"

namespace relic {

class SystemFormatError : public std::runtime_error {
 public:
  SystemFormatError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct TextSystem {
  /// Next-state functions as a canonical AIG (resets are all uninitialized;
  /// I lives in the system's CNF instead).
  aiger::AigModel model;
  TransitionSystem system;
};

TextSystem parse_system(std::string_view text);
TextSystem read_system_file(const std::filesystem::path& path);

}  // namespace relic
