#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace authorid {

// All recoverable failures carry a stable machine-readable code alongside the
// human-readable detail. The CLI maps these to exit code 2 and a one-line
// JSON object on stderr.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

namespace errc {
inline constexpr const char* malformed_record = "MalformedRecord";
inline constexpr const char* duplicate_id = "DuplicateId";
inline constexpr const char* invalid_label_combination = "InvalidLabelCombination";
inline constexpr const char* empty_text = "EmptyText";
inline constexpr const char* unknown_family = "UnknownFamily";
inline constexpr const char* config_invalid = "ConfigInvalid";
inline constexpr const char* dim_out_of_range = "DimOutOfRange";
inline constexpr const char* bad_magic = "BadMagic";
inline constexpr const char* unsupported_version = "UnsupportedVersion";
inline constexpr const char* dim_mismatch = "DimMismatch";
inline constexpr const char* truncated_file = "TruncatedFile";
inline constexpr const char* shape_mismatch = "ShapeMismatch";
inline constexpr const char* dim_invalid = "DimInvalid";
inline constexpr const char* degenerate_embedding = "DegenerateEmbedding";
inline constexpr const char* batch_too_small = "BatchTooSmall";
inline constexpr const char* empty_positives = "EmptyPositives";
inline constexpr const char* empty_batch = "EmptyBatch";
inline constexpr const char* insufficient_data = "InsufficientData";
inline constexpr const char* numerical_divergence = "NumericalDivergence";
inline constexpr const char* empty_index = "EmptyIndex";
inline constexpr const char* bad_k = "BadK";
inline constexpr const char* length_mismatch = "LengthMismatch";
inline constexpr const char* empty = "Empty";
inline constexpr const char* insufficient_pairs = "InsufficientPairs";
inline constexpr const char* missing_embedding = "MissingEmbedding";
inline constexpr const char* io_error = "IoError";
inline constexpr const char* usage = "UsageError";
}  // namespace errc

}  // namespace authorid
