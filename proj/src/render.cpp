// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadbev/render.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "roadbev/io.hpp"

namespace roadbev {

std::string encode_ppm(const PpmImage& image) {
  std::string out = "P6\n" + std::to_string(image.width) + " " +
                    std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.rgb.data()), image.rgb.size());
  return out;
}

void save_ppm(const PpmImage& image, const std::filesystem::path& path) {
  write_file(path, encode_ppm(image));
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

const char* category_color(Category c) {
  switch (group_of(c)) {
    case CategoryGroup::kVehicle: return "#2b6cb0";
    case CategoryGroup::kCyclist: return "#b7791f";
    case CategoryGroup::kPedestrian: return "#c53030";
  }
  return "#000000";
}

// Emits one panel's content: BEV-frame drawing with y up. `ox, oy` place the
// panel origin in page coordinates, `scale` is pixels per meter.
class SvgPanel {
 public:
  SvgPanel(std::ostringstream& out, double ox, double oy, double scale,
           double extent)
      : out_(out), ox_(ox), oy_(oy), scale_(scale), extent_(extent) {}

  double px(double x) const { return ox_ + (x + extent_) * scale_; }
  double py(double y) const { return oy_ + (extent_ - y) * scale_; }

  void frame_box() {
    out_ << "<rect x=\"" << num(ox_) << "\" y=\"" << num(oy_) << "\" width=\""
         << num(2 * extent_ * scale_) << "\" height=\""
         << num(2 * extent_ * scale_)
         << "\" fill=\"#fbfbf8\" stroke=\"#555\" stroke-width=\"1\"/>\n";
  }

  void range_circles(double spacing) {
    if (spacing <= 0.0) return;
    for (double r = spacing; r <= extent_ * 1.5; r += spacing) {
      out_ << "<circle cx=\"" << num(px(0)) << "\" cy=\"" << num(py(0))
           << "\" r=\"" << num(r * scale_)
           << "\" fill=\"none\" stroke=\"#ccc\" stroke-width=\"0.8\" "
              "stroke-dasharray=\"4 3\"/>\n";
    }
  }

  void axes() {
    arrow(0, 0, extent_ * 0.28, 0, "#c0392b");
    text(extent_ * 0.30, 0, "x", "#c0392b");
    arrow(0, 0, 0, extent_ * 0.28, "#27ae60");
    text(0, extent_ * 0.33, "y", "#27ae60");
  }

  void arrow(double x0, double y0, double x1, double y1, const char* color) {
    out_ << "<line x1=\"" << num(px(x0)) << "\" y1=\"" << num(py(y0))
         << "\" x2=\"" << num(px(x1)) << "\" y2=\"" << num(py(y1))
         << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    const double angle = std::atan2(y1 - y0, x1 - x0);
    const double head = 0.05 * extent_;
    for (double side : {0.5, -0.5}) {
      const double a = angle + kPi + side;
      out_ << "<line x1=\"" << num(px(x1)) << "\" y1=\"" << num(py(y1))
           << "\" x2=\"" << num(px(x1 + head * std::cos(a))) << "\" y2=\""
           << num(py(y1 + head * std::sin(a))) << "\" stroke=\"" << color
           << "\" stroke-width=\"1.5\"/>\n";
    }
  }

  void camera(const Eigen::Vector2d& pos, double yaw, const std::string& label) {
    const double size = 0.04 * extent_;
    out_ << "<circle cx=\"" << num(px(pos.x())) << "\" cy=\"" << num(py(pos.y()))
         << "\" r=\"" << num(size * scale_)
         << "\" fill=\"#333\"/>\n";
    // field-of-view wedge along the heading
    for (double spread : {-0.35, 0.35}) {
      const double a = yaw + spread;
      out_ << "<line x1=\"" << num(px(pos.x())) << "\" y1=\""
           << num(py(pos.y())) << "\" x2=\""
           << num(px(pos.x() + 0.22 * extent_ * std::cos(a))) << "\" y2=\""
           << num(py(pos.y() + 0.22 * extent_ * std::sin(a)))
           << "\" stroke=\"#888\" stroke-width=\"0.8\"/>\n";
    }
    text(pos.x() + 0.05 * extent_, pos.y() + 0.05 * extent_, label, "#333");
  }

  void box(const Box3D& b) {
    const double c = std::cos(b.yaw);
    const double s = std::sin(b.yaw);
    const double hl = b.dims.x() / 2.0;
    const double hw = b.dims.y() / 2.0;
    out_ << "<polygon points=\"";
    for (auto [lx, ly] : {std::pair{hl, hw}, std::pair{hl, -hw},
                          std::pair{-hl, -hw}, std::pair{-hl, hw}}) {
      const double x = b.center.x() + c * lx - s * ly;
      const double y = b.center.y() + s * lx + c * ly;
      out_ << num(px(x)) << "," << num(py(y)) << " ";
    }
    out_ << "\" fill=\"" << category_color(b.category)
         << "\" fill-opacity=\"0.5\" stroke=\"" << category_color(b.category)
         << "\" stroke-width=\"1\"/>\n";
    // heading tick from the center to the front face
    out_ << "<line x1=\"" << num(px(b.center.x())) << "\" y1=\""
         << num(py(b.center.y())) << "\" x2=\"" << num(px(b.center.x() + c * hl))
         << "\" y2=\"" << num(py(b.center.y() + s * hl))
         << "\" stroke=\"#111\" stroke-width=\"1\"/>\n";
  }

  void text(double x, double y, const std::string& s, const char* color) {
    out_ << "<text x=\"" << num(px(x)) << "\" y=\"" << num(py(y))
         << "\" font-family=\"monospace\" font-size=\"11\" fill=\"" << color
         << "\">" << s << "</text>\n";
  }

  void caption(const std::string& s) {
    out_ << "<text x=\"" << num(ox_) << "\" y=\""
         << num(oy_ + 2 * extent_ * scale_ + 16)
         << "\" font-family=\"monospace\" font-size=\"12\" fill=\"#111\">" << s
         << "</text>\n";
  }

 private:
  std::ostringstream& out_;
  double ox_, oy_, scale_, extent_;
};

double scene_extent(const SceneConfig& scene) {
  double extent = 10.0;
  for (const auto& cam : scene.cameras) {
    const Eigen::Vector3d c = scene.bev_frame.apply(cam.center());
    extent = std::max({extent, std::abs(c.x()), std::abs(c.y())});
  }
  for (const auto& obj : scene.objects) {
    extent = std::max({extent, std::abs(obj.box.center.x()),
                       std::abs(obj.box.center.y())});
  }
  return extent * 1.15;
}

void draw_scene_panel(std::ostringstream& out, const SceneConfig& scene,
                      double ox, double oy, double panel_px, double extent,
                      double circle_spacing, const std::string& label) {
  SvgPanel panel(out, ox, oy, panel_px / (2 * extent), extent);
  panel.frame_box();
  panel.range_circles(circle_spacing);
  panel.axes();
  for (const auto& cam : scene.cameras) {
    const Eigen::Vector3d c = scene.bev_frame.apply(cam.center());
    double yaw = 0.0;
    try {
      yaw = camera_yaw_in_frame(cam, scene.bev_frame);
    } catch (const DegeneratePose&) {
    }
    panel.camera(Eigen::Vector2d(c.x(), c.y()), yaw, cam.camera_id);
  }
  for (const auto& obj : scene.objects) {
    panel.box(obj.box);
  }
  if (!label.empty()) panel.caption(label);
}

}  // namespace

std::string render_scene_svg(const SceneConfig& scene,
                             const RenderOptions& options) {
  const double extent =
      options.extent > 0.0 ? options.extent : scene_extent(scene);
  const double panel_px = 480.0;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << num(panel_px + 20) << "\" height=\"" << num(panel_px + 40)
      << "\">\n";
  draw_scene_panel(out, scene, 10, 10, panel_px, extent,
                   options.circle_spacing, scene.scene_id);
  out << "</svg>\n";
  return out.str();
}

std::string render_detections_svg(const DetectionSet& set,
                                  const RenderOptions& options) {
  double extent = options.extent;
  if (extent <= 0.0) {
    extent = 10.0;
    for (const auto& frame : set.frames) {
      for (const auto& det : frame.objects) {
        extent = std::max({extent, std::abs(det.box.center.x()),
                           std::abs(det.box.center.y())});
      }
    }
    extent *= 1.15;
  }
  const double panel_px = 480.0;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << num(panel_px + 20) << "\" height=\"" << num(panel_px + 40)
      << "\">\n";
  SvgPanel panel(out, 10, 10, panel_px / (2 * extent), extent);
  panel.frame_box();
  panel.range_circles(options.circle_spacing);
  panel.axes();
  if (!set.frames.empty()) {
    for (const auto& det : set.frames.front().objects) {
      panel.box(det.box);
    }
    panel.caption("frame " + set.frames.front().frame_id);
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_two_panel_svg(const SceneConfig& left,
                                 const std::string& left_label,
                                 const SceneConfig& right,
                                 const std::string& right_label,
                                 const RenderOptions& options) {
  const double extent =
      options.extent > 0.0
          ? options.extent
          : std::max(scene_extent(left), scene_extent(right));
  const double panel_px = 420.0;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << num(2 * panel_px + 30) << "\" height=\"" << num(panel_px + 40)
      << "\">\n";
  draw_scene_panel(out, left, 10, 10, panel_px, extent, options.circle_spacing,
                   left_label);
  draw_scene_panel(out, right, panel_px + 20, 10, panel_px, extent,
                   options.circle_spacing, right_label);
  out << "</svg>\n";
  return out.str();
}

PpmImage render_hits_ppm(const MappingTable& table) {
  PpmImage image(table.grid.nx, table.grid.ny);
  std::size_t max_hits = 1;
  for (const auto& cell : table.cells) {
    max_hits = std::max(max_hits, cell.size());
  }
  for (int iy = 0; iy < table.grid.ny; ++iy) {
    for (int ix = 0; ix < table.grid.nx; ++ix) {
      const auto& cell = table.cell(ix, iy);
      const double t =
          static_cast<double>(cell.size()) / static_cast<double>(max_hits);
      const auto g = static_cast<std::uint8_t>(std::lround(255.0 * t));
      // row 0 is the far edge (largest y), so north is up
      image.set(ix, table.grid.ny - 1 - iy, g, g, g);
    }
  }
  return image;
}

PpmImage render_feature_norm_ppm(const BevFeature& feature) {
  PpmImage image(feature.nx, feature.ny);
  double max_norm = 0.0;
  std::vector<double> norms(static_cast<std::size_t>(feature.nx) * feature.ny);
  for (int iy = 0; iy < feature.ny; ++iy) {
    for (int ix = 0; ix < feature.nx; ++ix) {
      double acc = 0.0;
      for (int c = 0; c < feature.channels; ++c) {
        const double v = feature.at(c, ix, iy);
        acc += v * v;
      }
      const double n = std::sqrt(acc);
      norms[static_cast<std::size_t>(iy) * feature.nx + ix] = n;
      max_norm = std::max(max_norm, n);
    }
  }
  if (max_norm <= 0.0) max_norm = 1.0;
  for (int iy = 0; iy < feature.ny; ++iy) {
    for (int ix = 0; ix < feature.nx; ++ix) {
      const double t =
          norms[static_cast<std::size_t>(iy) * feature.nx + ix] / max_norm;
      const auto g = static_cast<std::uint8_t>(std::lround(255.0 * t));
      image.set(ix, feature.ny - 1 - iy, g, g, g);
    }
  }
  return image;
}

}  // namespace roadbev
