#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace medroi {

enum class ErrorCode {
  InvalidArgument,
  Io,
  UnsupportedFormat,
  // roi
  AllZeroVolume,
  EmptyTissueSet,
  // metadata
  WrongLength,
  InvalidBox,
  FieldOverflow,
  // codec
  UnknownCodec,
  UnsupportedMode,
  EncodeError,
  DecodeError,
  ExternalCodecError,
  // container
  BadMagic,
  Truncated,
  UnsupportedVersion,
  ShapeMismatch,
  // metrics / stats
  DimensionMismatch,
  SmallRegion,
  LengthMismatch,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library. `index` carries the slice or payload
// number when the failure is tied to one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> index = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace medroi
