// SPDX-License-Identifier: Apache-2.0

#ifndef NOPC_TEXT_FORMAT_HPP
#define NOPC_TEXT_FORMAT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace nopc
{

// Shortest representation that parses back to the same double.
std::string format_double(double v);
void append_double(std::string &out, double v);

// Whitespace tokenizer over a text document with line tracking for error messages.
class TokenReader
{
public:
  explicit TokenReader(std::string_view text) : text_(text) {}

  bool at_end();
  std::string_view next();
  std::string_view peek();
  double next_double();
  long long next_int();
  void expect(std::string_view keyword);
  std::size_t line() const { return line_; }

private:
  void skip_ws();
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

}  // namespace nopc

#endif  // NOPC_TEXT_FORMAT_HPP
