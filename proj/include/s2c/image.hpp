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
#ifndef S2C_IMAGE_HPP
#define S2C_IMAGE_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace s2c {

/// Grayscale raster, row-major, intensities in [0, 1] (0 = black, 1 = white).
class FrameImage {
 public:
  FrameImage() = default;
  FrameImage(int width, int height, float fill = 1.0F);
  FrameImage(int width, int height, std::vector<float> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  float at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  float& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

  std::span<const float> pixels() const noexcept { return pixels_; }
  std::span<float> pixels() noexcept { return pixels_; }

  void fill_rect(int x0, int y0, int w, int h, float value);
  void clamp();

  friend bool operator==(const FrameImage&, const FrameImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> pixels_;
};

/// Mean absolute pixel difference; images must share dimensions.
double mean_abs_diff(const FrameImage& a, const FrameImage& b);

/// Pixelwise L1 distance (sum of absolute differences).
double l1_distance(const FrameImage& a, const FrameImage& b);

double max_abs_diff(const FrameImage& a, const FrameImage& b);

// Binary PGM (P5, maxval 255), intensity = round(pixel * 255).
std::string encode_pgm(const FrameImage& img);
FrameImage decode_pgm(std::string_view bytes);
void write_pgm(const std::filesystem::path& path, const FrameImage& img);
FrameImage read_pgm(const std::filesystem::path& path);

}  // namespace s2c

#endif  // S2C_IMAGE_HPP
