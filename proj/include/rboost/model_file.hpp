#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "rboost/dataset.hpp"
#include "rboost/error.hpp"
#include "rboost/loss.hpp"
#include "rboost/model.hpp"

namespace rboost {

/// Model load failure caused by a checksum mismatch (as opposed to bad syntax).
class ChecksumError : public FormatError {
public:
    using FormatError::FormatError;
};

inline constexpr int kModelFormatVersion = 1;

/// A trained model together with the header fields persisted alongside it.
struct ModelFile {
    LossKind loss = LossKind::squared;
    Task task = Task::regression;
    std::uint64_t seed = 0;
    EnsembleModel model;
};

/// Text layout, one record per line:
///
///     rboost-model 1
///     loss squared
///     task regression
///     features 10
///     seed 42
///     intercept 0
///     terms 2
///     term 0.5 stump 3 0.25 -1 1 0
///     term -0.125 tree 3 N 0 0.5 1 2 L -1 L 2 scale 0.5
///     crc32 1a2b3c4d
///
/// Terms are written materialized (global scale 1) with 17 significant
/// digits. The footer is the CRC-32 of every preceding line including its
/// '\n'.
void write_model(std::ostream& out, const ModelFile& file);
std::string model_to_string(const ModelFile& file);

/// Throws FormatError on malformed input or an unknown version, and
/// ChecksumError when the footer does not match.
ModelFile read_model(std::istream& in);
ModelFile model_from_string(std::string_view text);

void save_model(const std::string& path, const ModelFile& file);
ModelFile load_model(const std::string& path);

std::uint32_t crc32_of(std::string_view bytes);

std::string_view to_string(Task task);
Task parse_task(std::string_view name);

}  // namespace rboost
