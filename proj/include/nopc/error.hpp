// SPDX-License-Identifier: Apache-2.0

#ifndef NOPC_ERROR_HPP
#define NOPC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nopc
{

// Iterative method failed to converge, or a computation produced non-finite values.
class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Malformed file or document.
class FormatError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

#define NOPC_REQUIRE(cond, msg)                                   \
  do                                                              \
  {                                                               \
    if (!(cond))                                                  \
    {                                                             \
      throw std::invalid_argument(std::string(__func__) + ": " + (msg)); \
    }                                                             \
  } while (false)

}  // namespace nopc

#endif  // NOPC_ERROR_HPP
