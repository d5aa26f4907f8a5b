#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace opcorrect {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Base of every error thrown by this project.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

} // namespace opcorrect
