#pragma once

#include <stdexcept>
#include <string>

namespace tracelens {

// Root of every exception thrown by the library. The CLI maps these to exit
// code 1 ("domain error").
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tracelens
