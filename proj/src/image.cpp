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
#include "s2c/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "s2c/error.hpp"

namespace s2c {

FrameImage::FrameImage(int width, int height, float fill)
    : width_(width), height_(height) {
  require(width > 0 && height > 0, ErrorCode::kShape, "image dimensions must be positive");
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

FrameImage::FrameImage(int width, int height, std::vector<float> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  require(width > 0 && height > 0, ErrorCode::kShape, "image dimensions must be positive");
  require(pixels_.size() == static_cast<std::size_t>(width) * height, ErrorCode::kShape,
          "pixel count does not match image dimensions");
}

void FrameImage::fill_rect(int x0, int y0, int w, int h, float value) {
  const int x1 = std::min(width_, x0 + w);
  const int y1 = std::min(height_, y0 + h);
  for (int y = std::max(0, y0); y < y1; ++y) {
    for (int x = std::max(0, x0); x < x1; ++x) at(x, y) = value;
  }
}

void FrameImage::clamp() {
  for (float& p : pixels_) p = std::clamp(p, 0.0F, 1.0F);
}

namespace {

void require_same_shape(const FrameImage& a, const FrameImage& b) {
  require(a.width() == b.width() && a.height() == b.height(), ErrorCode::kShape,
          "image dimensions differ");
}

}  // namespace

double l1_distance(const FrameImage& a, const FrameImage& b) {
  require_same_shape(a, b);
  double sum = 0.0;
  auto pa = a.pixels();
  auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) sum += std::fabs(double(pa[i]) - double(pb[i]));
  return sum;
}

double mean_abs_diff(const FrameImage& a, const FrameImage& b) {
  if (a.empty()) return 0.0;
  return l1_distance(a, b) / static_cast<double>(a.size());
}

double max_abs_diff(const FrameImage& a, const FrameImage& b) {
  require_same_shape(a, b);
  double m = 0.0;
  auto pa = a.pixels();
  auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) m = std::max(m, std::fabs(double(pa[i]) - double(pb[i])));
  return m;
}

std::string encode_pgm(const FrameImage& img) {
  require(!img.empty(), ErrorCode::kShape, "cannot serialize an empty image");
  std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  out.reserve(out.size() + img.size());
  for (float p : img.pixels()) {
    const long v = std::lround(std::clamp(p, 0.0F, 1.0F) * 255.0F);
    out.push_back(static_cast<char>(static_cast<unsigned char>(v)));
  }
  return out;
}

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const char c = bytes[pos];
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  return std::string(bytes.substr(start, pos - start));
}

int parse_header_int(const std::string& token) {
  require(!token.empty() && std::all_of(token.begin(), token.end(), ::isdigit), ErrorCode::kFormat,
          "malformed PGM header");
  return std::stoi(token);
}

}  // namespace

FrameImage decode_pgm(std::string_view bytes) {
  std::size_t pos = 0;
  require(next_token(bytes, pos) == "P5", ErrorCode::kFormat, "not a binary PGM (P5)");
  const int w = parse_header_int(next_token(bytes, pos));
  const int h = parse_header_int(next_token(bytes, pos));
  const int maxval = parse_header_int(next_token(bytes, pos));
  require(w > 0 && h > 0, ErrorCode::kFormat, "PGM dimensions must be positive");
  require(maxval == 255, ErrorCode::kFormat, "only 8-bit PGM (maxval 255) is supported");
  require(pos < bytes.size(), ErrorCode::kFormat, "PGM truncated after header");
  ++pos;  // single whitespace byte after maxval
  const std::size_t n = static_cast<std::size_t>(w) * h;
  require(bytes.size() - pos >= n, ErrorCode::kFormat, "PGM pixel data truncated");
  std::vector<float> pixels(n);
  for (std::size_t i = 0; i < n; ++i) {
    pixels[i] = static_cast<float>(static_cast<unsigned char>(bytes[pos + i])) / 255.0F;
  }
  return FrameImage(w, h, std::move(pixels));
}

void write_pgm(const std::filesystem::path& path, const FrameImage& img) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot open for writing: " + path.string());
  const std::string bytes = encode_pgm(img);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorCode::kIo, "write failed: " + path.string());
}

FrameImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open for reading: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_pgm(buf.str());
}

}  // namespace s2c
