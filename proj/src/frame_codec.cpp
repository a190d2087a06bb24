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
#include "s2c/frame_codec.hpp"

#include <algorithm>
#include <array>

#include "s2c/error.hpp"

namespace s2c::codec {

// ---------------------------------------------------------------- Bitstream

Bitstream::Bitstream(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) require(b <= 1, ErrorCode::kEncoding, "bit values must be 0 or 1");
}

namespace {

// Decodes UTF-8 into code points; rejects malformed sequences.
std::vector<std::uint32_t> utf8_code_points(std::string_view s) {
  std::vector<std::uint32_t> out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    int extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      cp = c & 0x1F;
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      cp = c & 0x0F;
      extra = 2;
    } else if ((c & 0xF8) == 0xF0) {
      cp = c & 0x07;
      extra = 3;
    } else {
      fail(ErrorCode::kEncoding, "malformed UTF-8 at byte " + std::to_string(i));
    }
    require(i + extra < s.size(), ErrorCode::kEncoding, "truncated UTF-8 sequence");
    for (int k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      require((cc & 0xC0) == 0x80, ErrorCode::kEncoding, "malformed UTF-8 continuation byte");
      cp = (cp << 6) | (cc & 0x3F);
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace

Bitstream Bitstream::from_text(std::string_view utf8) {
  const auto cps = utf8_code_points(utf8);
  std::vector<std::uint8_t> bits;
  bits.reserve(cps.size() * 8);
  for (std::uint32_t cp : cps) {
    require(cp <= 0xFF, ErrorCode::kEncoding,
            "character U+" + std::to_string(cp) + " is outside the 8-bit range");
    for (int b = 7; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((cp >> b) & 1U));
  }
  return Bitstream(std::move(bits));
}

std::string Bitstream::to_text() const {
  require(bits_.size() % 8 == 0, ErrorCode::kEncoding, "bit count is not a multiple of 8");
  std::string out;
  for (std::size_t i = 0; i < bits_.size(); i += 8) {
    std::uint32_t cp = 0;
    for (std::size_t b = 0; b < 8; ++b) cp = (cp << 1) | bits_[i + b];
    append_utf8(out, cp);
  }
  return out;
}

void Bitstream::append(const Bitstream& other) {
  bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

void Bitstream::push_back(std::uint8_t bit) {
  require(bit <= 1, ErrorCode::kEncoding, "bit values must be 0 or 1");
  bits_.push_back(bit);
}

Bitstream Bitstream::slice(std::size_t begin, std::size_t count) const {
  begin = std::min(begin, bits_.size());
  count = std::min(count, bits_.size() - begin);
  return Bitstream(std::vector<std::uint8_t>(bits_.begin() + static_cast<std::ptrdiff_t>(begin),
                                             bits_.begin() + static_cast<std::ptrdiff_t>(begin + count)));
}

std::size_t hamming_distance(const Bitstream& a, const Bitstream& b) {
  const std::size_t n = std::min(a.size(), b.size());
  std::size_t d = std::max(a.size(), b.size()) - n;
  for (std::size_t i = 0; i < n; ++i) d += a[i] != b[i];
  return d;
}

std::size_t char_count(std::string_view utf8) { return utf8_code_points(utf8).size(); }

// ---------------------------------------------------------------- kinds

std::string_view label(FrameKind kind) {
  switch (kind) {
    case FrameKind::kDataQr1: return "d_f1";
    case FrameKind::kDataQr2: return "d_f2";
    case FrameKind::kAscii: return "a_f";
    case FrameKind::kOverhead: return "o_f";
  }
  return "?";
}

std::string_view name(FrameKind kind) {
  switch (kind) {
    case FrameKind::kDataQr1: return "data_qr1";
    case FrameKind::kDataQr2: return "data_qr2";
    case FrameKind::kAscii: return "ascii";
    case FrameKind::kOverhead: return "overhead";
  }
  return "?";
}

FrameKind kind_from_name(std::string_view n) {
  for (FrameKind k : kAllKinds) {
    if (n == name(k) || n == label(k)) return k;
  }
  fail(ErrorCode::kConfig, "unknown frame kind: " + std::string(n));
}

// ---------------------------------------------------------------- layout

void CodecConfig::validate() const {
  require(frame_px > 0 && grid_cells > 0, ErrorCode::kConfig, "frame_px and grid_cells must be positive");
  require(frame_px % grid_cells == 0, ErrorCode::kConfig, "frame_px must be divisible by grid_cells");
  require(cell_px() >= 3, ErrorCode::kConfig, "cells must be at least 3 px wide for center sampling");
  require(finder_size >= 1 && quiet_zone >= 0, ErrorCode::kConfig, "invalid finder geometry");
  require(2 * (finder_size + quiet_zone) <= grid_cells, ErrorCode::kConfig,
          "finder patterns do not fit in the grid");
  require(capacity(FrameKind::kDataQr1) > 0 && capacity(FrameKind::kAscii) > 0, ErrorCode::kConfig,
          "layout leaves no payload cells");
}

std::size_t CodecConfig::capacity(FrameKind kind) const {
  const long g = grid_cells;
  if (is_qr_kind(kind)) {
    const long block = finder_size + quiet_zone;
    return static_cast<std::size_t>(std::max(0L, g * g - 3 * block * block));
  }
  return static_cast<std::size_t>(std::max(0L, (g - 2) * (g - 2)));
}

std::vector<CellRole> cell_roles(FrameKind kind, const CodecConfig& cfg) {
  const int g = cfg.grid_cells;
  std::vector<CellRole> roles(static_cast<std::size_t>(g) * g, CellRole::kPayload);
  if (!is_qr_kind(kind)) {
    for (int r = 0; r < g; ++r) {
      for (int c = 0; c < g; ++c) {
        if (r == 0 || c == 0 || r == g - 1 || c == g - 1) roles[r * g + c] = CellRole::kBorder;
      }
    }
    return roles;
  }
  const int f = cfg.finder_size;
  const int block = f + cfg.quiet_zone;
  const std::array<std::pair<int, int>, 3> origins = {{{0, 0}, {0, g - f}, {g - f, 0}}};
  // Quiet rings first; finder squares overwrite their own cells.
  const std::array<std::pair<int, int>, 3> quiet_origins = {{{0, 0}, {0, g - block}, {g - block, 0}}};
  for (auto [r0, c0] : quiet_origins) {
    for (int r = r0; r < r0 + block; ++r) {
      for (int c = c0; c < c0 + block; ++c) roles[r * g + c] = CellRole::kQuiet;
    }
  }
  for (auto [r0, c0] : origins) {
    for (int r = r0; r < r0 + f; ++r) {
      for (int c = c0; c < c0 + f; ++c) roles[r * g + c] = CellRole::kFinder;
    }
  }
  return roles;
}

std::vector<int> payload_cells(FrameKind kind, const CodecConfig& cfg) {
  const auto roles = cell_roles(kind, cfg);
  std::vector<int> cells;
  cells.reserve(cfg.capacity(kind));
  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (roles[i] == CellRole::kPayload) cells.push_back(static_cast<int>(i));
  }
  return cells;
}

// ---------------------------------------------------------------- segmentation

std::vector<FramePayload> segment_stream(const Bitstream& bits, std::size_t capacity, FrameKind kind) {
  require(capacity > 0, ErrorCode::kConfig, "frame capacity must be positive");
  std::vector<FramePayload> out;
  for (std::size_t begin = 0; begin < bits.size(); begin += capacity) {
    Bitstream chunk = bits.slice(begin, capacity);
    chunk.resize(capacity);
    out.push_back({std::move(chunk), kind});
  }
  return out;
}

Bitstream reassemble(const std::vector<FramePayload>& payloads, std::size_t length) {
  Bitstream all;
  for (const auto& p : payloads) all.append(p.bits);
  require(all.size() >= length, ErrorCode::kCapacity, "payloads hold fewer bits than the recorded length");
  all.resize(length);
  return all;
}

// ---------------------------------------------------------------- rendering

namespace {

constexpr float kDark = 0.0F;
constexpr float kLight = 1.0F;

bool finder_cell_dark(int r, int c, int f) {
  const int d = std::min({r, c, f - 1 - r, f - 1 - c});
  return d == 0 || d >= 2;
}

void paint_cell(FrameImage& img, int cell, int g, int px, float value) {
  img.fill_rect((cell % g) * px, (cell / g) * px, px, px, value);
}

}  // namespace

FrameImage encode_frame(const FramePayload& payload, const CodecConfig& cfg) {
  cfg.validate();
  const std::size_t cap = cfg.capacity(payload.kind);
  require(payload.bits.size() <= cap, ErrorCode::kCapacity,
          "payload of " + std::to_string(payload.bits.size()) + " bits exceeds capacity " + std::to_string(cap));
  const int g = cfg.grid_cells;
  const int px = cfg.cell_px();
  FrameImage img(cfg.frame_px, cfg.frame_px, kLight);

  const auto roles = cell_roles(payload.kind, cfg);
  if (is_qr_kind(payload.kind)) {
    const int f = cfg.finder_size;
    const std::array<std::pair<int, int>, 3> origins = {{{0, 0}, {0, g - f}, {g - f, 0}}};
    for (auto [r0, c0] : origins) {
      for (int r = 0; r < f; ++r) {
        for (int c = 0; c < f; ++c) {
          if (finder_cell_dark(r, c, f)) paint_cell(img, (r0 + r) * g + (c0 + c), g, px, kDark);
        }
      }
    }
  } else {
    for (std::size_t i = 0; i < roles.size(); ++i) {
      if (roles[i] == CellRole::kBorder) paint_cell(img, static_cast<int>(i), g, px, kDark);
    }
  }

  std::size_t bit = 0;
  for (std::size_t i = 0; i < roles.size() && bit < payload.bits.size(); ++i) {
    if (roles[i] != CellRole::kPayload) continue;
    if (payload.bits[bit] == 1) paint_cell(img, static_cast<int>(i), g, px, kDark);
    ++bit;
  }
  return img;
}

FramePayload decode_frame(const FrameImage& img, FrameKind kind, const CodecConfig& cfg) {
  cfg.validate();
  require(img.width() == cfg.frame_px && img.height() == cfg.frame_px, ErrorCode::kShape,
          "frame is " + std::to_string(img.width()) + "x" + std::to_string(img.height()) + ", expected " +
              std::to_string(cfg.frame_px) + "x" + std::to_string(cfg.frame_px));
  const int g = cfg.grid_cells;
  const int px = cfg.cell_px();
  const int inner = px - 2;
  const float norm = 1.0F / static_cast<float>(inner * inner);
  std::vector<std::uint8_t> bits;
  for (int cell : payload_cells(kind, cfg)) {
    const int x0 = (cell % g) * px + 1;
    const int y0 = (cell / g) * px + 1;
    float sum = 0.0F;
    for (int y = y0; y < y0 + inner; ++y) {
      for (int x = x0; x < x0 + inner; ++x) sum += img.at(x, y);
    }
    bits.push_back(sum * norm < 0.5F ? 1 : 0);
  }
  return {Bitstream(std::move(bits)), kind};
}

// ---------------------------------------------------------------- fixed frames

std::string_view sync_text() {
  static const std::string text(100, '\x7E');
  return text;
}

const Bitstream& sync_codeword() {
  static const Bitstream bits = Bitstream::from_text(sync_text());
  return bits;
}

Bitstream sync_payload(const CodecConfig& cfg) {
  Bitstream bits = sync_codeword().slice(0, cfg.capacity(FrameKind::kOverhead));
  bits.resize(cfg.capacity(FrameKind::kOverhead));
  return bits;
}

FrameImage make_overhead_frame(const CodecConfig& cfg) {
  return encode_frame({sync_payload(cfg), FrameKind::kOverhead}, cfg);
}

std::string_view base_text(FrameKind kind) {
  switch (kind) {
    case FrameKind::kDataQr1:
      return "Sphinx of black quartz, judge my vow. Pack my box with five dozen liquor jugs! 0123456789";
    case FrameKind::kDataQr2:
      return "The quick brown fox jumps over the lazy dog; how vexingly quick daft zebras jump? #2024";
    case FrameKind::kAscii:
      return "ASCII-FRAME: Jackdaws love my big sphinx of quartz. Waltz, bad nymph, for quick jigs vex.";
    case FrameKind::kOverhead:
      return sync_text();
  }
  return {};
}

FrameImage base_frame(FrameKind kind, const CodecConfig& cfg) {
  if (kind == FrameKind::kOverhead) return make_overhead_frame(cfg);
  Bitstream bits = Bitstream::from_text(base_text(kind)).slice(0, cfg.capacity(kind));
  return encode_frame({std::move(bits), kind}, cfg);
}

std::vector<FrameImage> frames_for_text(std::string_view utf8, FrameKind kind, const CodecConfig& cfg,
                                        std::optional<std::size_t> capacity) {
  cfg.validate();
  require(!utf8.empty() || kind == FrameKind::kOverhead, ErrorCode::kEncoding, "data frames need non-empty text");
  const std::size_t layout_cap = cfg.capacity(kind);
  const std::size_t cap = capacity.value_or(layout_cap);
  require(cap > 0 && cap <= layout_cap, ErrorCode::kCapacity,
          "requested capacity " + std::to_string(cap) + " outside (0, " + std::to_string(layout_cap) + "]");
  std::vector<FrameImage> frames;
  for (const auto& payload : segment_stream(Bitstream::from_text(utf8), cap, kind)) {
    frames.push_back(encode_frame(payload, cfg));
  }
  return frames;
}

}  // namespace s2c::codec
