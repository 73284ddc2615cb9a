#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vast {

enum class Errc {
  // input validation
  MalformedRecord,
  RatingOutOfRange,
  DuplicateWord,
  RatingMismatch,
  SizeMismatch,
  NonFiniteValue,
  UnsupportedVersion,
  InvariantViolation,
  DimensionMismatch,
  LengthMismatch,
  UnequalTargetSizes,
  RowCountMismatch,
  EvenBucketCount,
  KOutOfRange,
  LayerOutOfRange,
  InvalidArgument,
  Io,
  // missing words
  UnknownWord,
  MissingWord,
  WordNotFoundInCorpus,
  // degenerate statistics
  EmptyPolarGroup,
  InsufficientWords,
  InsufficientSingles,
  ZeroVector,
  DegenerateStd,
  ZeroVariance,
  DegenerateInput,
  EmptyAfterDrops,
  AllPairsSkipped,
  NonFiniteLoss,
};

inline std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::RatingOutOfRange: return "RatingOutOfRange";
    case Errc::DuplicateWord: return "DuplicateWord";
    case Errc::RatingMismatch: return "RatingMismatch";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::UnequalTargetSizes: return "UnequalTargetSizes";
    case Errc::RowCountMismatch: return "RowCountMismatch";
    case Errc::EvenBucketCount: return "EvenBucketCount";
    case Errc::KOutOfRange: return "KOutOfRange";
    case Errc::LayerOutOfRange: return "LayerOutOfRange";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
    case Errc::UnknownWord: return "UnknownWord";
    case Errc::MissingWord: return "MissingWord";
    case Errc::WordNotFoundInCorpus: return "WordNotFoundInCorpus";
    case Errc::EmptyPolarGroup: return "EmptyPolarGroup";
    case Errc::InsufficientWords: return "InsufficientWords";
    case Errc::InsufficientSingles: return "InsufficientSingles";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::DegenerateStd: return "DegenerateStd";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::EmptyAfterDrops: return "EmptyAfterDrops";
    case Errc::AllPairsSkipped: return "AllPairsSkipped";
    case Errc::NonFiniteLoss: return "NonFiniteLoss";
  }
  return "Unknown";
}

// Process exit codes used by the command-line frontend.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 2;
inline constexpr int validation = 3;
inline constexpr int missing_words = 4;
inline constexpr int degenerate = 5;
}  // namespace exit_code

inline int exit_code_for(Errc c) {
  switch (c) {
    case Errc::UnknownWord:
    case Errc::MissingWord:
    case Errc::WordNotFoundInCorpus:
      return exit_code::missing_words;
    case Errc::EmptyPolarGroup:
    case Errc::InsufficientWords:
    case Errc::InsufficientSingles:
    case Errc::ZeroVector:
    case Errc::DegenerateStd:
    case Errc::ZeroVariance:
    case Errc::DegenerateInput:
    case Errc::EmptyAfterDrops:
    case Errc::AllPairsSkipped:
    case Errc::NonFiniteLoss:
      return exit_code::degenerate;
    default:
      return exit_code::validation;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace vast
