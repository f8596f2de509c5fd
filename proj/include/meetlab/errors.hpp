#pragma once

#include <stdexcept>
#include <string>

namespace meetlab {

// Exit-code mapping used by the CLI: InvalidInput -> 2, NumericalFailure -> 3.
class InvalidInput : public std::runtime_error {
public:
  explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

class NumericalFailure : public std::runtime_error {
public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

// A function was evaluated at (or too close to) a spectral singularity.
class SingularityError : public NumericalFailure {
public:
  explicit SingularityError(const std::string& what) : NumericalFailure(what) {}
};

}  // namespace meetlab
