#include "swmsim/regularity.hpp"

namespace swmsim {

std::string RegularityViolation::label() const {
  switch (kind) {
    case Kind::NotWorkConserving:
      return "not work-conserving";
    case Kind::UnforcedDrop:
      return "unforced drop";
    case Kind::MissingSnapshot:
      return "missing snapshot";
  }
  return "unknown";
}

}  // namespace swmsim
