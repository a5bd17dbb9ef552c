#pragma once

#include <stdexcept>
#include <string>

namespace agentopt {

// Base class for all library errors. Subclasses carry no extra state;
// the what() string names the offending entity.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- construction / validation ---
struct EmptyRoleSet : Error { EmptyRoleSet() : Error("pipeline has no roles") {} };
struct EmptyCandidateList : Error {
    explicit EmptyCandidateList(const std::string& role)
        : Error("role '" + role + "' has no candidate models") {}
};
struct DuplicateCandidate : Error {
    DuplicateCandidate(const std::string& role, const std::string& model)
        : Error("role '" + role + "' lists model '" + model + "' more than once") {}
};
struct NonFiniteInput : Error { explicit NonFiniteInput(const std::string& msg) : Error(msg) {} };
struct UnknownModel : Error {
    explicit UnknownModel(const std::string& model)
        : Error("no price entry for model '" + model + "'") {}
};
struct UnknownRole : Error {
    explicit UnknownRole(const std::string& role) : Error("unknown role '" + role + "'") {}
};

// --- score matrix ---
struct IndexOutOfRange : Error { explicit IndexOutOfRange(const std::string& msg) : Error(msg) {} };
struct CellAlreadyObserved : Error {
    CellAlreadyObserved(long long combo, long long datapoint)
        : Error("cell (" + std::to_string(combo) + ", " + std::to_string(datapoint) +
                ") already observed") {}
};

// --- evaluation substrate ---
struct EvaluationFailed : Error { explicit EvaluationFailed(const std::string& detail) : Error(detail) {} };
struct ProtocolViolation : Error { explicit ProtocolViolation(const std::string& detail) : Error(detail) {} };
struct ChildExited : Error { explicit ChildExited(const std::string& detail) : Error(detail) {} };
struct TimeoutExpired : Error { explicit TimeoutExpired(const std::string& detail) : Error(detail) {} };
struct CacheIo : Error { explicit CacheIo(const std::string& detail) : Error(detail) {} };
struct IncompleteMatrix : Error { explicit IncompleteMatrix(const std::string& detail) : Error(detail) {} };
struct DuplicateCell : Error { explicit DuplicateCell(const std::string& detail) : Error(detail) {} };

// --- selectors ---
struct BudgetExceedsSpace : Error { explicit BudgetExceedsSpace(const std::string& msg) : Error(msg) {} };
struct ProposerUnavailable : Error { explicit ProposerUnavailable(const std::string& msg) : Error(msg) {} };
struct MalformedProposal : Error { explicit MalformedProposal(const std::string& msg) : Error(msg) {} };

// --- surrogates ---
struct InsufficientObservations : Error {
    explicit InsufficientObservations(const std::string& msg) : Error(msg) {}
};
struct NumericalFailure : Error { explicit NumericalFailure(const std::string& msg) : Error(msg) {} };
struct ShapeMismatch : Error { explicit ShapeMismatch(const std::string& msg) : Error(msg) {} };

// --- proxy ---
struct UnknownPair : Error { explicit UnknownPair(const std::string& msg) : Error(msg) {} };
struct DuplicateScore : Error { explicit DuplicateScore(const std::string& msg) : Error(msg) {} };
struct ScoreOutOfRange : Error { explicit ScoreOutOfRange(const std::string& msg) : Error(msg) {} };

// --- report / cli ---
struct IoError : Error { explicit IoError(const std::string& msg) : Error(msg) {} };
struct NoBestCombination : Error { NoBestCombination() : Error("report has no evaluated combination") {} };
struct MissingReference : Error { explicit MissingReference(const std::string& msg) : Error(msg) {} };
struct ConfigError : Error { explicit ConfigError(const std::string& msg) : Error(msg) {} };

}  // namespace agentopt
