#pragma once

#include <stdexcept>
#include <string>

namespace hardedge {

/// Bad input: malformed descriptors, out-of-domain arguments, inconsistent
/// configuration. The CLI maps this to exit code 2.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine hit its iteration or refinement cap. The CLI maps
/// this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

}  // namespace detail
}  // namespace hardedge
