#ifndef HARDCORE_FIELD_IO_HPP
#define HARDCORE_FIELD_IO_HPP

// JSON field files:
//   {"scale": lambda, "region": [x_min, y_min, x_max, y_max], "values": [[x, y, value], ...]}
// Every region site must appear exactly once.

#include <iosfwd>
#include <string>

#include "hardcore/disorder.hpp"

namespace hardcore {

ActivityField parse_field_json(const std::string& text);
ActivityField read_field_file(const std::string& path);
std::string field_to_json(const ActivityField& f);

}  // namespace hardcore

#endif  // HARDCORE_FIELD_IO_HPP
