#include "volterra/errors.hpp"

namespace volterra {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::even_period: return "EvenPeriod";
        case Errc::too_short: return "TooShort";
        case Errc::non_positive_weight: return "NonPositiveWeight";
        case Errc::invalid_range: return "InvalidRange";
        case Errc::out_of_range: return "OutOfRange";
        case Errc::length_mismatch: return "LengthMismatch";
        case Errc::bad_file: return "BadFile";
        case Errc::parity_violation: return "ParityViolation";
        case Errc::root_finding_failure: return "RootFindingFailure";
        case Errc::degenerate_spectrum: return "DegenerateSpectrum";
        case Errc::singular_curve: return "SingularCurve";
        case Errc::branch_ambiguity: return "BranchAmbiguity";
        case Errc::pole_hit: return "PoleHit";
        case Errc::fit_ill_conditioned: return "FitIllConditioned";
        case Errc::near_branch_point: return "NearBranchPoint";
        case Errc::sheet_flip: return "SheetFlip";
        case Errc::canonicity_failure: return "CanonicityFailure";
        case Errc::positivity_loss: return "PositivityLoss";
        case Errc::step_limit_exceeded: return "StepLimitExceeded";
    }
    return "UnknownError";
}

bool is_input_error(Errc code) {
    switch (code) {
        case Errc::even_period:
        case Errc::too_short:
        case Errc::non_positive_weight:
        case Errc::invalid_range:
        case Errc::out_of_range:
        case Errc::length_mismatch:
        case Errc::bad_file:
            return true;
        default:
            return false;
    }
}

}  // namespace volterra
