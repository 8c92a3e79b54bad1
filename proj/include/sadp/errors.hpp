#pragma once

#include <stdexcept>

namespace sadp {

/// A learning update produced a non-finite or runaway value.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sadp
