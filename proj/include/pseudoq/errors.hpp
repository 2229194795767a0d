#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace pseudoq {

// Every failure mode the library can raise. Codes are stable identifiers:
// they appear verbatim in CLI error reports and must not be renamed.
enum class Errc {
  NonFinite,
  NotHermitian,
  NotSymmetric,
  NotPsd,
  Singular,
  NotUnimodular,
  NotOrthogonal,
  NotProductForm,
  InvalidBasis,
  ZeroPseudoNorm,
  LinearlyDependent,
  NotNormalized,
  InvalidState,
  Degenerate,
  NotTransformable,
  ZeroProbability,
  InternalCheck,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonFinite: return "NonFinite";
    case Errc::NotHermitian: return "NotHermitian";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NotPsd: return "NotPsd";
    case Errc::Singular: return "Singular";
    case Errc::NotUnimodular: return "NotUnimodular";
    case Errc::NotOrthogonal: return "NotOrthogonal";
    case Errc::NotProductForm: return "NotProductForm";
    case Errc::InvalidBasis: return "InvalidBasis";
    case Errc::ZeroPseudoNorm: return "ZeroPseudoNorm";
    case Errc::LinearlyDependent: return "LinearlyDependent";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::InvalidState: return "InvalidState";
    case Errc::Degenerate: return "Degenerate";
    case Errc::NotTransformable: return "NotTransformable";
    case Errc::ZeroProbability: return "ZeroProbability";
    case Errc::InternalCheck: return "InternalCheck";
  }
  return "Unknown";
}

// Library-wide exception. `index` carries the failing step for staged
// algorithms (Gram-Schmidt step, polar-route stage), when applicable.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Error(Errc code, std::string message, int index)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message +
                           " (step " + std::to_string(index) + ")"),
        code_(code),
        index_(index) {}

  Errc code() const noexcept { return code_; }
  std::optional<int> index() const noexcept { return index_; }

 private:
  Errc code_;
  std::optional<int> index_;
};

}  // namespace pseudoq
