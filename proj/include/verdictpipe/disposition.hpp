#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace verdictpipe {

/// Operative outcome of an appeal. The enumerator order is the canonical
/// row/column order of every report and confusion matrix.
enum class Disposition { Allow = 0, Dismiss = 1, Dispose = 2 };

inline constexpr std::size_t kNumClasses = 3;

inline constexpr std::array<Disposition, kNumClasses> kAllDispositions = {
    Disposition::Allow, Disposition::Dismiss, Disposition::Dispose};

using ClassProbabilities = std::array<double, kNumClasses>;

constexpr std::size_t class_index(Disposition d) noexcept {
  return static_cast<std::size_t>(d);
}

constexpr Disposition disposition_at(std::size_t i) noexcept {
  return static_cast<Disposition>(i);
}

/// Lowercase class name: "allow", "dismiss" or "dispose".
std::string_view disposition_name(Disposition d) noexcept;

/// Case-insensitive inverse of disposition_name.
std::optional<Disposition> parse_disposition(std::string_view name) noexcept;

}  // namespace verdictpipe
