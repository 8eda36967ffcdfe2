#pragma once

#include <stdexcept>
#include <string>

namespace metaseg {

// Root of every exception thrown by the library. Callers that only need to
// distinguish "bad input" from programming errors can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace metaseg
