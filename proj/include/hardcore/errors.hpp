#ifndef HARDCORE_ERRORS_HPP
#define HARDCORE_ERRORS_HPP

#include <stdexcept>

namespace hardcore {

/// A size limit of an exact method was exceeded.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hardcore

#endif  // HARDCORE_ERRORS_HPP
