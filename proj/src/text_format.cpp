// SPDX-License-Identifier: Apache-2.0

#include "nopc/text_format.hpp"

#include <array>
#include <cctype>
#include <charconv>

#include "nopc/error.hpp"

namespace nopc
{

void append_double(std::string &out, double v)
{
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), res.ptr);
}

std::string format_double(double v)
{
  std::string s;
  append_double(s, v);
  return s;
}

void TokenReader::skip_ws()
{
  while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
  {
    if (text_[pos_] == '\n')
    {
      ++line_;
    }
    ++pos_;
  }
}

bool TokenReader::at_end()
{
  skip_ws();
  return pos_ >= text_.size();
}

std::string_view TokenReader::peek()
{
  skip_ws();
  std::size_t end = pos_;
  while (end < text_.size() && !std::isspace(static_cast<unsigned char>(text_[end])))
  {
    ++end;
  }
  return text_.substr(pos_, end - pos_);
}

std::string_view TokenReader::next()
{
  const auto tok = peek();
  if (tok.empty())
  {
    throw FormatError("unexpected end of document at line " + std::to_string(line_));
  }
  pos_ += tok.size();
  return tok;
}

double TokenReader::next_double()
{
  const auto tok = next();
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
  {
    throw FormatError("expected a number at line " + std::to_string(line_) + ", got '" +
                      std::string(tok) + "'");
  }
  return v;
}

long long TokenReader::next_int()
{
  const auto tok = next();
  long long v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
  {
    throw FormatError("expected an integer at line " + std::to_string(line_) + ", got '" +
                      std::string(tok) + "'");
  }
  return v;
}

void TokenReader::expect(std::string_view keyword)
{
  const auto tok = next();
  if (tok != keyword)
  {
    throw FormatError("expected '" + std::string(keyword) + "' at line " +
                      std::to_string(line_) + ", got '" + std::string(tok) + "'");
  }
}

}  // namespace nopc
