#include "csimit/assignment.hpp"

#include <sstream>
#include <stdexcept>

namespace csimit {

PartialAssignment PartialAssignment::merged_with(
    const PartialAssignment& other) const {
  PartialAssignment out = *this;
  for (const auto& [var, value] : other.bindings_) {
    auto mine = get(var);
    if (mine && *mine != value) {
      throw std::invalid_argument("conflicting bindings for '" + var + "': '" +
                                  *mine + "' vs '" + value + "'");
    }
    out.bind(var, value);
  }
  return out;
}

std::string PartialAssignment::to_key() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [var, value] : bindings_) {
    if (!first) os << ',';
    os << var << '=' << value;
    first = false;
  }
  return os.str();
}

}  // namespace csimit
