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
#ifndef S2C_FRAME_CODEC_HPP
#define S2C_FRAME_CODEC_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "s2c/image.hpp"

namespace s2c::codec {

/// Ordered bit sequence; each element is 0 or 1.
class Bitstream {
 public:
  Bitstream() = default;
  explicit Bitstream(std::vector<std::uint8_t> bits);

  /// UTF-8 text whose code points are all <= 0xFF; 8 bits per character, MSB first.
  static Bitstream from_text(std::string_view utf8);
  /// Inverse of from_text. Length must be a multiple of 8.
  std::string to_text() const;

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  void append(const Bitstream& other);
  void push_back(std::uint8_t bit);
  void resize(std::size_t n) { bits_.resize(n, 0); }
  Bitstream slice(std::size_t begin, std::size_t count) const;

  friend bool operator==(const Bitstream&, const Bitstream&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Number of positions where two streams differ, plus the length difference.
std::size_t hamming_distance(const Bitstream& a, const Bitstream& b);

/// Counts code points of a UTF-8 string (the `char` count of a text).
std::size_t char_count(std::string_view utf8);

enum class FrameKind : std::uint8_t { kDataQr1, kDataQr2, kAscii, kOverhead };

inline constexpr FrameKind kAllKinds[] = {FrameKind::kDataQr1, FrameKind::kDataQr2, FrameKind::kAscii,
                                          FrameKind::kOverhead};

/// Dataset labels d_f1, d_f2, a_f, o_f.
std::string_view label(FrameKind kind);
/// Config / CSV name: data_qr1, data_qr2, ascii, overhead.
std::string_view name(FrameKind kind);
FrameKind kind_from_name(std::string_view name);

/// True for kinds rendered with finder patterns (both data classes and overhead).
constexpr bool is_qr_kind(FrameKind kind) { return kind != FrameKind::kAscii; }

enum class CellRole : std::uint8_t { kPayload, kFinder, kQuiet, kBorder };

struct CodecConfig {
  int frame_px = 100;
  int grid_cells = 25;
  int finder_size = 7;
  /// Light separator ring around each finder square, in cells.
  int quiet_zone = 1;

  int cell_px() const { return frame_px / grid_cells; }
  void validate() const;
  /// Payload cells for a given layout; QR kinds and Ascii differ.
  std::size_t capacity(FrameKind kind) const;

  friend bool operator==(const CodecConfig&, const CodecConfig&) = default;
};

/// Row-major role of every cell for the layout of `kind`.
std::vector<CellRole> cell_roles(FrameKind kind, const CodecConfig& cfg);

/// Row-major indices of payload cells, the order bits are written in.
std::vector<int> payload_cells(FrameKind kind, const CodecConfig& cfg);

struct FramePayload {
  Bitstream bits;
  FrameKind kind = FrameKind::kDataQr1;
};

/// Splits a stream into payloads of `capacity` bits; the last one is zero-padded.
/// The original length is not stored in-band.
std::vector<FramePayload> segment_stream(const Bitstream& bits, std::size_t capacity,
                                         FrameKind kind = FrameKind::kDataQr1);

/// Concatenates payloads and drops padding beyond `length`.
Bitstream reassemble(const std::vector<FramePayload>& payloads, std::size_t length);

FrameImage encode_frame(const FramePayload& payload, const CodecConfig& cfg);

/// Returns exactly capacity(kind) bits, padding included.
FramePayload decode_frame(const FrameImage& img, FrameKind kind, const CodecConfig& cfg);

/// Text of the overhead frame: 100 HDLC flag bytes (0x7E).
std::string_view sync_text();
/// 8-bit codes of sync_text(); 800 bits.
const Bitstream& sync_codeword();
/// Sync codeword truncated or zero-padded to the QR capacity of `cfg`.
Bitstream sync_payload(const CodecConfig& cfg);

FrameImage make_overhead_frame(const CodecConfig& cfg);

/// Fixed content of the dataset's DataQr1 / DataQr2 / Ascii base frames.
std::string_view base_text(FrameKind kind);
/// Base frame of a class: its fixed text (or the sync codeword) fitted to capacity.
FrameImage base_frame(FrameKind kind, const CodecConfig& cfg);

/// text -> bits -> segment -> encode. `capacity` defaults to the layout's full
/// capacity and may only shrink it.
std::vector<FrameImage> frames_for_text(std::string_view utf8, FrameKind kind, const CodecConfig& cfg,
                                        std::optional<std::size_t> capacity = std::nullopt);

}  // namespace s2c::codec

#endif  // S2C_FRAME_CODEC_HPP
