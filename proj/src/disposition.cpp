#include "verdictpipe/disposition.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace verdictpipe {

std::string_view disposition_name(Disposition d) noexcept {
  switch (d) {
    case Disposition::Allow: return "allow";
    case Disposition::Dismiss: return "dismiss";
    case Disposition::Dispose: return "dispose";
  }
  return "?";
}

std::optional<Disposition> parse_disposition(std::string_view name) noexcept {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Disposition d : kAllDispositions) {
    if (lower == disposition_name(d)) return d;
  }
  return std::nullopt;
}

}  // namespace verdictpipe
