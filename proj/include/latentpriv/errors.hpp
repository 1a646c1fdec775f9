#ifndef LATENTPRIV_ERRORS_HPP
#define LATENTPRIV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace latentpriv {

// Raised when a computation produces non-finite values or fails to converge.
// Precondition violations (bad dimensions, out-of-range parameters) use
// std::invalid_argument instead; the CLI maps the two onto distinct exit codes.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace latentpriv

#endif  // LATENTPRIV_ERRORS_HPP
