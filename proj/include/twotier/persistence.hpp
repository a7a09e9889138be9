#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

#include "twotier/knn.hpp"
#include "twotier/nn.hpp"

namespace twotier::persistence {

/// Current `.htm-model` format version. Files with any other version are
/// rejected with UnsupportedVersion.
inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kFileExtension = ".htm-model";

using AnyModel = std::variant<knn::KnnModel, nn::NnModel>;

/// FNV-1a 64-bit hash; the envelope checksum over the payload text.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Payload text only (no envelope); exposed for fixtures and tests.
std::string encode_payload(const AnyModel& model);

/// Wraps a payload in the versioned envelope.
std::string wrap_envelope(std::string_view kind, std::string_view payload,
                          int version = kFormatVersion);

std::string save_model_string(const AnyModel& model);
void save_model(const AnyModel& model, std::ostream& sink);
/// Writes to a temporary sibling and renames, so readers never see a
/// partially written file. Throws Error(SinkWriteFailure).
void save_model_file(const AnyModel& model, const std::filesystem::path& path);

/// Parses, verifies the checksum and re-validates every model invariant.
/// Throws Error(ParseError | ChecksumMismatch | UnsupportedVersion |
/// InvariantViolation); nothing is returned on failure.
AnyModel load_model(std::istream& source);
AnyModel load_model_string(std::string_view text);
AnyModel load_model_file(const std::filesystem::path& path);

}  // namespace twotier::persistence
