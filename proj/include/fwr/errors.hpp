#pragma once

#include <stdexcept>
#include <string>

namespace fwr {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define FWR_DEFINE_ERROR(Name)                                      \
    struct Name : Error {                                           \
        explicit Name(const std::string& what) : Error(what) {}     \
    }

FWR_DEFINE_ERROR(NotOnBoundary);
FWR_DEFINE_ERROR(OutsideDomain);
FWR_DEFINE_ERROR(ProjectionDiverged);
FWR_DEFINE_ERROR(NoConvergence);
FWR_DEFINE_ERROR(StepRejected);
FWR_DEFINE_ERROR(ChainEmpty);
FWR_DEFINE_ERROR(DegenerateSegment);
FWR_DEFINE_ERROR(TooFar);
FWR_DEFINE_ERROR(NoDescent);
FWR_DEFINE_ERROR(NoFeasiblePath);
FWR_DEFINE_ERROR(UnreachableTarget);
FWR_DEFINE_ERROR(TooLarge);
FWR_DEFINE_ERROR(NonGenericTie);
FWR_DEFINE_ERROR(AtBreakpoint);
FWR_DEFINE_ERROR(InconsistentMatrix);
FWR_DEFINE_ERROR(ConfigInvalid);
FWR_DEFINE_ERROR(HorizonInfeasible);
FWR_DEFINE_ERROR(CFLViolation);

#undef FWR_DEFINE_ERROR

}  // namespace fwr
