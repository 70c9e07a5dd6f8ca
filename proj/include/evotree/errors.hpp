#pragma once

#include <stdexcept>
#include <string>

namespace evotree {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define EVOTREE_DEFINE_ERROR(Name)            \
  class Name : public Error {                 \
   public:                                    \
    using Error::Error;                       \
  }

// graph-core
EVOTREE_DEFINE_ERROR(DuplicateIdError);
EVOTREE_DEFINE_ERROR(InvalidYearError);
EVOTREE_DEFINE_ERROR(EmptyTitleError);
EVOTREE_DEFINE_ERROR(UnknownEndpointError);
EVOTREE_DEFINE_ERROR(AchronologicalEdgeError);
EVOTREE_DEFINE_ERROR(CycleIntroducedError);
EVOTREE_DEFINE_ERROR(MissingAttributionError);

// importance
EVOTREE_DEFINE_ERROR(EmptyGraphError);
EVOTREE_DEFINE_ERROR(NonConvergenceError);
EVOTREE_DEFINE_ERROR(OutOfRangeError);

// oracles
EVOTREE_DEFINE_ERROR(OracleUnavailableError);
EVOTREE_DEFINE_ERROR(MalformedResponseError);
EVOTREE_DEFINE_ERROR(BudgetExceededError);

// search
EVOTREE_DEFINE_ERROR(UnvisitedNodeError);
EVOTREE_DEFINE_ERROR(MissingImportanceError);
EVOTREE_DEFINE_ERROR(AchronologicalPathError);
EVOTREE_DEFINE_ERROR(EmptyCorpusError);

// tvcv
EVOTREE_DEFINE_ERROR(NoCandidatesError);
EVOTREE_DEFINE_ERROR(NoSupportFoundError);
EVOTREE_DEFINE_ERROR(ExpansionExhaustedError);

// ranli
EVOTREE_DEFINE_ERROR(EmptyDocumentError);
EVOTREE_DEFINE_ERROR(MissingCitationError);

// retrospect
EVOTREE_DEFINE_ERROR(NoTerminalsError);

// eval
EVOTREE_DEFINE_ERROR(NoTargetsError);
EVOTREE_DEFINE_ERROR(EmptyPredictionsError);
EVOTREE_DEFINE_ERROR(EmptyTruthError);
EVOTREE_DEFINE_ERROR(NoEdgesError);
EVOTREE_DEFINE_ERROR(InconsistentProportionsError);

// ingest
EVOTREE_DEFINE_ERROR(UnreadableFileError);

#undef EVOTREE_DEFINE_ERROR

/// Schema errors carry the JSON path of the offending field, e.g. "nodes[3].year".
class SchemaViolationError : public Error {
 public:
  SchemaViolationError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace evotree
