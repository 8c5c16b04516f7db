// Copyright (c) 2026 The roadbev Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadbev/scene.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"
#include "roadbev/io.hpp"
#include "roadbev/rng.hpp"

namespace roadbev {

void SceneConfig::validate(int max_cameras) const {
  if (cameras.empty()) {
    throw ValidationError("SceneConfig: camera count must be >= 1");
  }
  if (static_cast<int>(cameras.size()) > max_cameras) {
    throw ValidationError("SceneConfig: camera count " +
                          std::to_string(cameras.size()) +
                          " exceeds the configured maximum " +
                          std::to_string(max_cameras));
  }
  if (!roi_refs.empty() && roi_refs.size() != cameras.size()) {
    throw ValidationError(
        "SceneConfig: roi_refs must be empty or one entry per camera");
  }
  std::set<std::string> cam_ids;
  for (const auto& cam : cameras) {
    cam.intrinsics.validate();
    if (!cam_ids.insert(cam.camera_id).second) {
      throw ValidationError("SceneConfig: duplicate camera_id " +
                            cam.camera_id);
    }
  }
  std::set<std::string> obj_ids;
  for (const auto& obj : objects) {
    obj.box.validate();
    if (!obj_ids.insert(obj.id).second) {
      throw ValidationError("SceneConfig: duplicate object id " + obj.id);
    }
  }
}

bool exactly_equal(const SceneConfig& a, const SceneConfig& b) {
  if (a.scene_id != b.scene_id) return false;
  if (!exactly_equal(a.bev_frame, b.bev_frame)) return false;
  if (a.cameras.size() != b.cameras.size()) return false;
  for (std::size_t i = 0; i < a.cameras.size(); ++i) {
    const auto& ca = a.cameras[i];
    const auto& cb = b.cameras[i];
    if (ca.camera_id != cb.camera_id) return false;
    if (!exactly_equal(ca.world_to_camera, cb.world_to_camera)) return false;
    const auto& ka = ca.intrinsics;
    const auto& kb = cb.intrinsics;
    if (ka.fx != kb.fx || ka.fy != kb.fy || ka.cx != kb.cx || ka.cy != kb.cy ||
        ka.width != kb.width || ka.height != kb.height)
      return false;
  }
  if (a.roi_refs != b.roi_refs) return false;
  if (a.objects.size() != b.objects.size()) return false;
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    const auto& oa = a.objects[i];
    const auto& ob = b.objects[i];
    if (oa.id != ob.id || oa.box.category != ob.box.category) return false;
    if (oa.box.center != ob.box.center || oa.box.dims != ob.box.dims ||
        oa.box.yaw != ob.box.yaw)
      return false;
  }
  return true;
}

std::string to_string(SceneLayout layout) {
  return layout == SceneLayout::kCorridor ? "corridor" : "intersection";
}

SceneLayout layout_from_string(const std::string& name) {
  if (name == "corridor") return SceneLayout::kCorridor;
  if (name == "intersection") return SceneLayout::kIntersection;
  throw ValidationError("unknown layout: " + name);
}

void SyntheticSceneSpec::validate() const {
  if (num_cameras < 1 || num_cameras > max_cameras) {
    throw ValidationError("SyntheticSceneSpec: num_cameras must be in [1, " +
                          std::to_string(max_cameras) + "]");
  }
  if (!(pole_height_min > 0.0 && pole_height_max < 100.0 &&
        pole_height_min <= pole_height_max)) {
    throw ValidationError(
        "SyntheticSceneSpec: pole_height_range must be within (0, 100)");
  }
  if (num_objects < 0) {
    throw ValidationError("SyntheticSceneSpec: num_objects must be >= 0");
  }
  if (object_mix.vehicle < 0.0 || object_mix.cyclist < 0.0 ||
      object_mix.pedestrian < 0.0 ||
      object_mix.vehicle + object_mix.cyclist + object_mix.pedestrian <= 0.0) {
    throw ValidationError("SyntheticSceneSpec: object_mix must be nonnegative "
                          "with positive sum");
  }
}

namespace {

constexpr double kDeg = kPi / 180.0;

// Camera rotation from a forward (optical axis) direction, image y pointing
// toward the ground for a level camera.
RigidTransform look_along(const Eigen::Vector3d& position,
                          const Eigen::Vector3d& forward) {
  const Eigen::Vector3d z = forward.normalized();
  Eigen::Vector3d x = z.cross(Eigen::Vector3d::UnitZ());
  x.normalize();
  const Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix3d cam_to_world;
  cam_to_world.col(0) = x;
  cam_to_world.col(1) = y;
  cam_to_world.col(2) = z;
  const Eigen::Matrix3d r = cam_to_world.transpose();
  return RigidTransform(r, -(r * position));
}

PinholeIntrinsics sample_intrinsics(Rng& rng) {
  PinholeIntrinsics k;
  k.width = 960;
  k.height = 544;
  const double f = rng.uniform(900.0, 1400.0);
  k.fx = f;
  k.fy = f * rng.uniform(0.98, 1.02);
  k.cx = k.width / 2.0 + rng.uniform(-8.0, 8.0);
  k.cy = k.height / 2.0 + rng.uniform(-8.0, 8.0);
  return k;
}

struct ObjectTemplate {
  Category category;
  double length, width, height;
};

const ObjectTemplate kTemplates[] = {
    {Category::kCar, 4.5, 1.9, 1.6},
    {Category::kVan, 5.2, 2.0, 2.1},
    {Category::kBus, 11.0, 2.9, 3.2},
    {Category::kTruck, 8.5, 2.6, 3.0},
    {Category::kCyclist, 1.8, 0.6, 1.7},
    {Category::kMotorcyclist, 2.1, 0.8, 1.5},
    {Category::kTricyclist, 2.6, 1.0, 1.6},
    {Category::kPedestrian, 0.6, 0.6, 1.7},
};

ObjectTemplate pick_template(Rng& rng, const ObjectMix& mix) {
  const double total = mix.vehicle + mix.cyclist + mix.pedestrian;
  const double r = rng.next_double() * total;
  CategoryGroup group;
  if (r < mix.vehicle) {
    group = CategoryGroup::kVehicle;
  } else if (r < mix.vehicle + mix.cyclist) {
    group = CategoryGroup::kCyclist;
  } else {
    group = CategoryGroup::kPedestrian;
  }
  switch (group) {
    case CategoryGroup::kVehicle:
      return kTemplates[rng.next_below(4)];
    case CategoryGroup::kCyclist:
      return kTemplates[4 + rng.next_below(3)];
    case CategoryGroup::kPedestrian:
      return kTemplates[7];
  }
  return kTemplates[0];
}

std::string zero_padded(const char* prefix, int i, int digits) {
  std::ostringstream out;
  out << prefix;
  std::string n = std::to_string(i);
  for (int k = static_cast<int>(n.size()); k < digits; ++k) out << '0';
  out << n;
  return out.str();
}

// World yaw -> BEV yaw given a vertical-rotation bev_frame.
double frame_heading(const RigidTransform& frame) {
  return std::atan2(frame.rotation()(1, 0), frame.rotation()(0, 0));
}

}  // namespace

SceneConfig generate_synthetic_scene(const SyntheticSceneSpec& spec) {
  spec.validate();
  SceneConfig scene;
  scene.scene_id =
      to_string(spec.layout) + "-seed" + std::to_string(spec.seed);

  Rng site_rng(Rng::mix(spec.seed, 0));
  const Eigen::Vector2d origin(site_rng.uniform(-50.0, 50.0),
                               site_rng.uniform(-50.0, 50.0));
  const double site_azimuth = site_rng.uniform(-kPi, kPi);
  const Eigen::Vector2d along(std::cos(site_azimuth), std::sin(site_azimuth));
  const Eigen::Vector2d lateral(-along.y(), along.x());

  // World -> BEV: +Y runs along the corridor (or toward the intersection
  // center), origin at the site anchor point.
  const RigidTransform heading =
      RigidTransform::rotation_z(wrap_angle(kHalfPi - site_azimuth));
  scene.bev_frame = RigidTransform(
      heading.rotation(),
      -(heading.rotation() * Eigen::Vector3d(origin.x(), origin.y(), 0.0)));

  for (int i = 0; i < spec.num_cameras; ++i) {
    Rng rng(Rng::mix(spec.seed, 1000 + static_cast<std::uint64_t>(i)));
    const double h = rng.uniform(spec.pole_height_min, spec.pole_height_max);

    Eigen::Vector2d pole;
    Eigen::Vector2d aim_point;
    if (spec.layout == SceneLayout::kCorridor) {
      const double s = 30.0 + 60.0 * i;
      const double side = (i % 2 == 0) ? 1.0 : -1.0;
      pole = origin + along * s + lateral * (side * 18.0);
      const double ahead = rng.uniform(10.0, 40.0);
      aim_point = origin + along * (s + ahead) +
                  lateral * rng.uniform(-6.0, 6.0);
    } else {
      const double slot =
          (kTwoPi * i) / spec.num_cameras + rng.uniform(-0.2, 0.2);
      const double radius = rng.uniform(22.0, 40.0);
      pole = origin + radius * Eigen::Vector2d(std::cos(slot), std::sin(slot));
      aim_point = origin + Eigen::Vector2d(rng.uniform(-8.0, 8.0),
                                           rng.uniform(-8.0, 8.0));
    }

    const Eigen::Vector2d to_aim = aim_point - pole;
    const double aim_azimuth =
        std::atan2(to_aim.y(), to_aim.x()) + rng.uniform(-0.08, 0.08);
    const double pitch = rng.uniform(20.0 * kDeg, 50.0 * kDeg);
    const Eigen::Vector3d forward(std::cos(pitch) * std::cos(aim_azimuth),
                                  std::cos(pitch) * std::sin(aim_azimuth),
                                  -std::sin(pitch));

    CameraModel cam;
    cam.camera_id = zero_padded("cam", i, 2);
    cam.intrinsics = sample_intrinsics(rng);
    cam.world_to_camera =
        look_along(Eigen::Vector3d(pole.x(), pole.y(), h), forward);
    scene.cameras.push_back(std::move(cam));
  }

  const double bev_heading = frame_heading(scene.bev_frame);
  for (int j = 0; j < spec.num_objects; ++j) {
    Rng rng(Rng::mix(spec.seed, 2000 + static_cast<std::uint64_t>(j)));
    const ObjectTemplate tmpl = pick_template(rng, spec.object_mix);
    const double jitter = rng.uniform(0.92, 1.08);
    const Eigen::Vector3d dims(tmpl.length * jitter, tmpl.width * jitter,
                               tmpl.height * jitter);

    bool placed = false;
    for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
      const auto& cam =
          scene.cameras[(static_cast<std::size_t>(j) + attempt) %
                        scene.cameras.size()];
      const auto& k = cam.intrinsics;
      const double margin_u = 0.12 * k.width;
      const double margin_v = 0.12 * k.height;
      const Eigen::Vector2d pixel(
          rng.uniform(margin_u, k.width - margin_u),
          rng.uniform(0.40 * k.height, k.height - margin_v));

      // Intersect the pixel ray with the ground plane z = 0.
      const Eigen::Vector3d cam_center = cam.center();
      const Eigen::Vector3d ray =
          (unproject(cam, pixel, 1.0) - cam_center).normalized();
      if (ray.z() >= -0.05) continue;  // ray does not reach the ground
      const double range = -cam_center.z() / ray.z();
      if (range > 250.0) continue;
      const Eigen::Vector3d ground = cam_center + range * ray;
      const Eigen::Vector3d center_world(ground.x(), ground.y(),
                                         dims.z() / 2.0);

      const auto proj = project(cam, center_world);
      if (!proj || !k.contains(proj->pixel.x(), proj->pixel.y())) continue;

      const double yaw_world = rng.uniform(-kPi, kPi);
      SceneObject obj;
      obj.id = zero_padded("obj", j, 3);
      obj.box = Box3D(scene.bev_frame.apply(center_world), dims,
                      wrap_angle(yaw_world + bev_heading), tmpl.category);
      scene.objects.push_back(std::move(obj));
      placed = true;
    }
    if (!placed) {
      throw InfeasibleLayout("generate_synthetic_scene: could not place object " +
                             std::to_string(j) + " inside any camera view");
    }
  }

  scene.validate(spec.max_cameras);
  return scene;
}

// ---------------------------------------------------------------------------
// JSON serialization

namespace {

using json = nlohmann::ordered_json;

json vec3_to_json(const Eigen::Vector3d& v) {
  return json::array({v.x(), v.y(), v.z()});
}

json transform_to_json(const RigidTransform& t) {
  json rot = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(t.rotation()(r, c));
  return json{{"rotation", std::move(rot)},
              {"translation", vec3_to_json(t.translation())}};
}

const json& require(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(ctx + ": missing field '" + key + "'");
  }
  return *it;
}

double as_number(const json& j, const std::string& ctx) {
  if (!j.is_number()) throw ParseError(ctx + ": expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& ctx) {
  if (!j.is_number_integer()) throw ParseError(ctx + ": expected an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& ctx) {
  if (!j.is_string()) throw ParseError(ctx + ": expected a string");
  return j.get<std::string>();
}

Eigen::Vector3d vec3_from_json(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError(ctx + ": expected an array of 3 numbers");
  }
  return Eigen::Vector3d(as_number(j[0], ctx), as_number(j[1], ctx),
                         as_number(j[2], ctx));
}

RigidTransform transform_from_json(const json& j, const std::string& ctx) {
  const json& rot = require(j, "rotation", ctx);
  if (!rot.is_array() || rot.size() != 9) {
    throw ParseError(ctx + ".rotation: expected an array of 9 numbers "
                           "(row-major)");
  }
  Eigen::Matrix3d r;
  for (int i = 0; i < 9; ++i) {
    r(i / 3, i % 3) = as_number(rot[static_cast<std::size_t>(i)], ctx + ".rotation");
  }
  const Eigen::Vector3d t =
      vec3_from_json(require(j, "translation", ctx), ctx + ".translation");
  try {
    return RigidTransform(r, t);
  } catch (const ValidationError& e) {
    throw ValidationError(ctx + ": " + e.what());
  }
}

}  // namespace

std::string scene_to_json(const SceneConfig& scene) {
  json j;
  j["scene_id"] = scene.scene_id;
  j["bev_frame"] = transform_to_json(scene.bev_frame);
  json cams = json::array();
  for (std::size_t i = 0; i < scene.cameras.size(); ++i) {
    const auto& cam = scene.cameras[i];
    json jc;
    jc["camera_id"] = cam.camera_id;
    jc["intrinsics"] = json{{"fx", cam.intrinsics.fx}, {"fy", cam.intrinsics.fy},
                            {"cx", cam.intrinsics.cx}, {"cy", cam.intrinsics.cy},
                            {"width", cam.intrinsics.width},
                            {"height", cam.intrinsics.height}};
    jc["world_to_camera"] = transform_to_json(cam.world_to_camera);
    if (!scene.roi_refs.empty() && !scene.roi_refs[i].empty()) {
      jc["roi_mask"] = scene.roi_refs[i];
    }
    cams.push_back(std::move(jc));
  }
  j["cameras"] = std::move(cams);
  json objs = json::array();
  for (const auto& obj : scene.objects) {
    objs.push_back(json{{"id", obj.id},
                        {"category", to_string(obj.box.category)},
                        {"center", vec3_to_json(obj.box.center)},
                        {"dims", vec3_to_json(obj.box.dims)},
                        {"yaw", obj.box.yaw}});
  }
  j["objects"] = std::move(objs);
  return j.dump(2) + "\n";
}

SceneConfig scene_from_json(const std::string& text, const std::string& context) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(context + ": " + e.what());
  }
  if (!j.is_object()) throw ParseError(context + ": expected a JSON object");

  SceneConfig scene;
  scene.scene_id = as_string(require(j, "scene_id", context), context + ".scene_id");
  scene.bev_frame =
      transform_from_json(require(j, "bev_frame", context), context + ".bev_frame");

  const json& cams = require(j, "cameras", context);
  if (!cams.is_array()) throw ParseError(context + ".cameras: expected an array");
  bool any_roi = false;
  std::vector<std::string> roi_refs;
  for (std::size_t i = 0; i < cams.size(); ++i) {
    const std::string ctx = context + ".cameras[" + std::to_string(i) + "]";
    const json& jc = cams[i];
    CameraModel cam;
    cam.camera_id = as_string(require(jc, "camera_id", ctx), ctx + ".camera_id");
    const json& jk = require(jc, "intrinsics", ctx);
    const std::string kctx = ctx + ".intrinsics";
    cam.intrinsics.fx = as_number(require(jk, "fx", kctx), kctx + ".fx");
    cam.intrinsics.fy = as_number(require(jk, "fy", kctx), kctx + ".fy");
    cam.intrinsics.cx = as_number(require(jk, "cx", kctx), kctx + ".cx");
    cam.intrinsics.cy = as_number(require(jk, "cy", kctx), kctx + ".cy");
    cam.intrinsics.width = as_int(require(jk, "width", kctx), kctx + ".width");
    cam.intrinsics.height = as_int(require(jk, "height", kctx), kctx + ".height");
    cam.world_to_camera = transform_from_json(
        require(jc, "world_to_camera", ctx), ctx + ".world_to_camera");
    if (jc.contains("roi_mask")) {
      roi_refs.push_back(as_string(jc["roi_mask"], ctx + ".roi_mask"));
      any_roi = true;
    } else {
      roi_refs.push_back("");
    }
    scene.cameras.push_back(std::move(cam));
  }
  if (any_roi) scene.roi_refs = std::move(roi_refs);

  const json& objs = require(j, "objects", context);
  if (!objs.is_array()) throw ParseError(context + ".objects: expected an array");
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const std::string ctx = context + ".objects[" + std::to_string(i) + "]";
    const json& jo = objs[i];
    SceneObject obj;
    obj.id = as_string(require(jo, "id", ctx), ctx + ".id");
    const std::string cat =
        as_string(require(jo, "category", ctx), ctx + ".category");
    Box3D box;
    try {
      box = Box3D(vec3_from_json(require(jo, "center", ctx), ctx + ".center"),
                  vec3_from_json(require(jo, "dims", ctx), ctx + ".dims"),
                  as_number(require(jo, "yaw", ctx), ctx + ".yaw"),
                  category_from_string(cat));
    } catch (const ValidationError& e) {
      throw ValidationError(ctx + ": " + e.what());
    }
    obj.box = box;
    scene.objects.push_back(std::move(obj));
  }

  scene.validate();
  return scene;
}

void save_scene(const SceneConfig& scene, const std::filesystem::path& path) {
  write_file(path, scene_to_json(scene));
}

SceneConfig load_scene(const std::filesystem::path& path) {
  return scene_from_json(read_file(path), path.string());
}

}  // namespace roadbev
