#include "rsed/types.hpp"

namespace rsed {

char to_char(EventKind k) {
  switch (k) {
    case EventKind::I: return 'I';
    case EventKind::E: return 'E';
    case EventKind::C: return 'C';
  }
  return '?';
}

std::string_view to_string(Domain d) {
  return d == Domain::lung ? "lung" : "tracheal";
}

EventKind parse_kind(std::string_view token) {
  if (token == "I") return EventKind::I;
  if (token == "E") return EventKind::E;
  if (token == "C") return EventKind::C;
  throw DataError("unknown event kind '" + std::string(token) + "'");
}

Domain parse_domain(std::string_view token) {
  if (token == "lung") return Domain::lung;
  if (token == "tracheal") return Domain::tracheal;
  throw DataError("unknown domain '" + std::string(token) + "'");
}

}  // namespace rsed
