#pragma once

#include <stdexcept>
#include <string>

namespace pflow {

/// Base for all toolkit errors. `category()` separates input/contract
/// violations (exit code 2 in the CLI) from numerical failures (exit code 3).
class Error : public std::runtime_error {
public:
    enum class Category { Validation, Numerical };

    Error(Category cat, const std::string& code, const std::string& what)
        : std::runtime_error(what), cat_(cat), code_(code) {}

    Category category() const { return cat_; }
    const std::string& code() const { return code_; }

private:
    Category cat_;
    std::string code_;
};

#define PFLOW_DEFINE_ERROR(NAME, CAT)                                     \
    class NAME : public Error {                                           \
    public:                                                               \
        explicit NAME(const std::string& what)                            \
            : Error(Error::Category::CAT, #NAME, what) {}                 \
    }

PFLOW_DEFINE_ERROR(ParseError, Validation);
PFLOW_DEFINE_ERROR(UnknownParam, Validation);
PFLOW_DEFINE_ERROR(DomainError, Validation);
PFLOW_DEFINE_ERROR(BadParams, Validation);
PFLOW_DEFINE_ERROR(DegenerateForm, Numerical);
PFLOW_DEFINE_ERROR(NotTangent, Validation);
PFLOW_DEFINE_ERROR(StepFailure, Numerical);
PFLOW_DEFINE_ERROR(InvalidLink, Validation);
PFLOW_DEFINE_ERROR(SingularJacobian, Numerical);
PFLOW_DEFINE_ERROR(AmbiguousTangent, Numerical);
PFLOW_DEFINE_ERROR(RefineNeeded, Numerical);
PFLOW_DEFINE_ERROR(CurvesIntersect, Validation);
PFLOW_DEFINE_ERROR(NoConnection, Numerical);
PFLOW_DEFINE_ERROR(VanishingField, Validation);
PFLOW_DEFINE_ERROR(SingularOnLoop, Validation);
PFLOW_DEFINE_ERROR(InvalidRHD, Validation);
PFLOW_DEFINE_ERROR(UnknownPreset, Validation);
PFLOW_DEFINE_ERROR(SceneError, Validation);

#undef PFLOW_DEFINE_ERROR

} // namespace pflow
