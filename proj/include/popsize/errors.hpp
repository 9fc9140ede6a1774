#ifndef POPSIZE_ERRORS_HPP
#define POPSIZE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace popsize {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Invalid parameter value (non-positive rate, negative quantile, ...).
class DomainError : public Error {
public:
  explicit DomainError(const std::string &msg) : Error(msg) {}
};

// Data that make an estimator undefined (f_2 = 0, mean count <= 1, ...).
class DegenerateDataError : public Error {
public:
  explicit DegenerateDataError(const std::string &msg) : Error(msg) {}
};

// Malformed input files or records; carries a line number when known.
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string &msg, long line = -1)
      : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  long line() const { return line_; }

private:
  long line_;
};

// Caller misuse: mismatched dimensions, non-nested models, bad flags.
class UsageError : public Error {
public:
  explicit UsageError(const std::string &msg) : Error(msg) {}
};

// Rank-deficient design or a non-invertible information matrix.
class SingularityError : public Error {
public:
  explicit SingularityError(const std::string &msg) : Error(msg) {}
};

// Logistic/ZT-Poisson likelihood maximised at the parameter boundary.
class SeparationError : public Error {
public:
  explicit SeparationError(const std::string &msg) : Error(msg) {}
};

// Iterative solver failed to converge; message carries the last iterate.
class IterationError : public Error {
public:
  explicit IterationError(const std::string &msg) : Error(msg) {}
};

} // namespace popsize

#endif
