// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "roadbev/features.hpp"
#include "roadbev/mapping.hpp"
#include "roadbev/metrics.hpp"
#include "roadbev/scene.hpp"

namespace roadbev {

// Simple binary PPM (P6) raster; deterministic bytes.
struct PpmImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // 3 bytes per pixel, row-major

  PpmImage() = default;
  PpmImage(int w, int h) : width(w), height(h),
      rgb(static_cast<std::size_t>(w) * h * 3, 0) {}
  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    auto* p = &rgb[(static_cast<std::size_t>(y) * width + x) * 3];
    p[0] = r;
    p[1] = g;
    p[2] = b;
  }
};

std::string encode_ppm(const PpmImage& image);
void save_ppm(const PpmImage& image, const std::filesystem::path& path);

struct RenderOptions {
  double circle_spacing = 100.0;  // meters between equidistant range circles
  double extent = 0.0;            // half-width of the view; 0 = fit content
};

// Top-down diagram of a scene in its BEV frame: range circles, cameras as
// heading wedges, objects as oriented rectangles.
std::string render_scene_svg(const SceneConfig& scene,
                             const RenderOptions& options = {});

// Detection boxes (first frame of the set) in the BEV plane.
std::string render_detections_svg(const DetectionSet& set,
                                  const RenderOptions& options = {});

// Two scenes side by side with a caption per panel; used by the orientation
// ambiguity demo.
std::string render_two_panel_svg(const SceneConfig& left,
                                 const std::string& left_label,
                                 const SceneConfig& right,
                                 const std::string& right_label,
                                 const RenderOptions& options = {});

// Per-cell hit counts as a grayscale raster (row 0 = largest y).
PpmImage render_hits_ppm(const MappingTable& table);

// Per-cell feature L2 norm as a grayscale raster.
PpmImage render_feature_norm_ppm(const BevFeature& feature);

}  // namespace roadbev
