#pragma once

#include <stdexcept>
#include <string>

namespace grassdyn {

enum class Errc {
  empty_support,
  dimension_mismatch,
  cap_exceeded,
  unsupported,
  singular,
  rank_deficient,
  dimension_drop,
  leakage,
  kernel_hit,
  precondition,
  truncation,
  non_ambiguity,
  hypothesis,
  no_control,
  retries_exhausted,
  config,
};

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind rather than on message text.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace grassdyn
