#pragma once

#include <stdexcept>
#include <string>

namespace plugpull {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pitch too close to +-pi/2 for the Euler-rate map.
class SingularAttitude : public Error {
 public:
  using Error::Error;
};

class DegenerateThrust : public Error {
 public:
  using Error::Error;
};

// Recovery window too short to pose the min-snap problem.
class DegenerateWindow : public Error {
 public:
  using Error::Error;
};

class OutOfWindow : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericalDivergence : public Error {
 public:
  using Error::Error;
};

}  // namespace plugpull
