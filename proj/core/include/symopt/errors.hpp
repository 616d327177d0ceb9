#pragma once

#include <stdexcept>
#include <string>

namespace symopt {

/* state or input index outside the system's range */
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/* non-finite value produced by the dynamics or the growth bound */
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/* invalid grid, model, or problem configuration */
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/* objects that were supposed to be derived from each other are not */
class IntegrityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/* concrete state whose cell is outside the controller domain */
class OutOfDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/* malformed system, controller, bounds, or config file */
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace symopt
