#pragma once

#include <stdexcept>
#include <string>

namespace tocs {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define TOCS_ERROR(Name)                    \
  struct Name : Error {                     \
    explicit Name(const std::string& what)  \
        : Error(#Name ": " + what) {}       \
  }

TOCS_ERROR(DivergenceError);
TOCS_ERROR(PoleError);
TOCS_ERROR(ContourError);
TOCS_ERROR(NonConvergence);
TOCS_ERROR(BasisMismatch);
TOCS_ERROR(NotNormalizable);
TOCS_ERROR(TruncationTooSmall);
TOCS_ERROR(FamilyMismatch);
TOCS_ERROR(IndexOutOfRange);
TOCS_ERROR(TailTooFat);
TOCS_ERROR(UnsupportedBasis);
TOCS_ERROR(UnsupportedModel);
TOCS_ERROR(GammaPole);
TOCS_ERROR(SingularWronskian);
TOCS_ERROR(CutoffExceeded);
TOCS_ERROR(ExpansionResidualTooLarge);
TOCS_ERROR(GramNotPSD);
TOCS_ERROR(ConfigError);

#undef TOCS_ERROR

}  // namespace tocs
