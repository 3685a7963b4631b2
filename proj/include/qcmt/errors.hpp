#pragma once

#include <stdexcept>
#include <string>

namespace qcmt {

/// A computation produced non-finite values or failed to converge.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qcmt
