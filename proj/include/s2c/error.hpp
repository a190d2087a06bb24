/**
 * Copyright 2026 The s2c-vlc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef S2C_ERROR_HPP
#define S2C_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace s2c {

enum class ErrorCode {
  kConfig,
  kShape,
  kCapacity,
  kEncoding,
  kFormat,
  kIo,
  kDomain,
  kOutOfStream,
  kLabelMap,
  kContract,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kCapacity: return "capacity";
    case ErrorCode::kEncoding: return "encoding";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kOutOfStream: return "out_of_stream";
    case ErrorCode::kLabelMap: return "label_map";
    case ErrorCode::kContract: return "contract";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the codes above so the
/// CLI can print a single machine-parsable line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace s2c

#endif  // S2C_ERROR_HPP
