#pragma once

#include <stdexcept>
#include <string>

namespace skillguard {

/// Base class for all toolkit errors. Specific failures derive from this so
/// callers can catch broadly or per condition.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// corpus
class MissingInstructionDoc : public Error { public: using Error::Error; };
class PathTraversalError : public Error { public: using Error::Error; };
class UnreadableSnapshot : public Error { public: using Error::Error; };
class TierContainmentViolation : public Error { public: using Error::Error; };

// pattern engine
class UnknownPatternId : public Error { public: using Error::Error; };
class DuplicatePatternId : public Error { public: using Error::Error; };
class PatternSpecMismatch : public Error { public: using Error::Error; };

class RegexCompileError : public Error {
public:
    RegexCompileError(std::string pattern_id, std::size_t detector_index, const std::string& what)
        : Error("pattern " + pattern_id + " detector #" + std::to_string(detector_index) +
                ": " + what),
          pattern_id_(std::move(pattern_id)),
          detector_index_(detector_index) {}

    const std::string& pattern_id() const { return pattern_id_; }
    std::size_t detector_index() const { return detector_index_; }

private:
    std::string pattern_id_;
    std::size_t detector_index_;
};

// instruction analysis
class UnknownSemanticRule : public Error { public: using Error::Error; };
class ServiceUnavailable : public Error { public: using Error::Error; };
class SchemaViolation : public Error { public: using Error::Error; };
class ClassifierTimeout : public Error { public: using Error::Error; };

// verifier
class MalformedTrace : public Error { public: using Error::Error; };
class InsufficientReviews : public Error { public: using Error::Error; };

// taxonomy
class UnconfirmedSkill : public Error { public: using Error::Error; };
class UnknownPattern : public Error { public: using Error::Error; };
class EmptyPatternSet : public Error { public: using Error::Error; };

// stats
class EmptyDataset : public Error { public: using Error::Error; };
class EmptyInput : public Error { public: using Error::Error; };
class EmptyGroup : public Error { public: using Error::Error; };
class ZeroSupport : public Error { public: using Error::Error; };
class NonPositiveK : public Error { public: using Error::Error; };
class LengthMismatch : public Error { public: using Error::Error; };
class AllZeroValues : public Error { public: using Error::Error; };
class OverflowGuard : public Error { public: using Error::Error; };

// pipeline / cli
class ConfigError : public Error { public: using Error::Error; };
class EmptyTier3 : public Error { public: using Error::Error; };
class RedactionFailure : public Error { public: using Error::Error; };

class StageFailure : public Error {
public:
    StageFailure(std::string stage, const std::string& cause)
        : Error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage)) {}

    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

}  // namespace skillguard
