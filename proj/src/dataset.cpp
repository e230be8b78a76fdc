#include "dusk/dataset.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace dusk {

namespace {

constexpr char kManifestName[] = "manifest.txt";
constexpr char kManifestHeader[] = "dusknerf-dataset 1";
constexpr char kDepthMagic[8] = {'D', 'U', 'S', 'K', 'D', 'P', 'T', '1'};

std::string join(const std::string& dir, const std::string& rel) {
  if (dir.empty()) return rel;
  return dir.back() == '/' ? dir + rel : dir + "/" + rel;
}

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("dataset: " + what);
}

}  // namespace

void save_manifest(const std::string& dir, const DatasetManifest& manifest) {
  const std::string path = join(dir, kManifestName);
  std::ofstream out(path);
  if (!out) fail("cannot write " + path);
  out << kManifestHeader << "\n";
  out << std::setprecision(17);
  out << "near " << manifest.near << "\n";
  out << "far " << manifest.far << "\n";
  for (const DatasetView& v : manifest.views) {
    out << "view " << v.image_path;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) out << " " << v.camera.pose(r, c);
    out << " " << v.camera.focal << " " << v.camera.cx << " " << v.camera.cy
        << " " << v.camera.width << " " << v.camera.height << " " << v.split;
    if (!v.depth_path.empty()) out << " depth=" << v.depth_path;
    if (!v.clean_path.empty()) out << " clean=" << v.clean_path;
    out << "\n";
  }
  if (!out) fail("short write to " + path);
}

DatasetManifest load_manifest(const std::string& dir) {
  const std::string path = join(dir, kManifestName);
  std::ifstream in(path);
  if (!in) fail("missing manifest " + path);
  std::string line;
  if (!std::getline(in, line) || line != kManifestHeader)
    fail("bad header in " + path);

  DatasetManifest manifest;
  bool have_near = false, have_far = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "near") {
      ls >> manifest.near;
      have_near = static_cast<bool>(ls);
    } else if (tag == "far") {
      ls >> manifest.far;
      have_far = static_cast<bool>(ls);
    } else if (tag == "view") {
      DatasetView v;
      ls >> v.image_path;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) ls >> v.camera.pose(r, c);
      ls >> v.camera.focal >> v.camera.cx >> v.camera.cy >> v.camera.width >>
          v.camera.height >> v.split;
      if (!ls) fail("malformed view record '" + line + "' in " + path);
      if (v.split != "train" && v.split != "eval")
        fail("unknown split tag '" + v.split + "' for " + v.image_path);
      std::string extra;
      while (ls >> extra) {
        if (extra.rfind("depth=", 0) == 0)
          v.depth_path = extra.substr(6);
        else if (extra.rfind("clean=", 0) == 0)
          v.clean_path = extra.substr(6);
        else
          fail("unknown field '" + extra + "' for " + v.image_path);
      }
      manifest.views.push_back(std::move(v));
    } else {
      fail("unknown record '" + tag + "' in " + path);
    }
  }
  if (!have_near || !have_far) fail("manifest missing near/far bounds");
  for (DatasetView& v : manifest.views) {
    v.camera.near = manifest.near;
    v.camera.far = manifest.far;
  }
  return manifest;
}

Dataset load_dataset(const std::string& dir) {
  Dataset ds;
  ds.manifest = load_manifest(dir);
  for (const DatasetView& v : ds.manifest.views) {
    try {
      ds.images.push_back(read_png(join(dir, v.image_path)));
      ds.depths.push_back(v.depth_path.empty()
                              ? Mat()
                              : read_depth(join(dir, v.depth_path)));
      ds.cleans.push_back(v.clean_path.empty()
                              ? Image{}
                              : read_png(join(dir, v.clean_path)));
    } catch (const std::exception& e) {
      fail("while loading view '" + v.image_path + "': " + e.what());
    }
    const Image& img = ds.images.back();
    if (img.rows() != v.camera.height || img.cols() != v.camera.width)
      fail("image size disagrees with intrinsics for " + v.image_path);
  }
  return ds;
}

std::vector<int> split_indices(const DatasetManifest& manifest,
                               const std::string& split) {
  std::vector<int> out;
  for (size_t i = 0; i < manifest.views.size(); ++i)
    if (manifest.views[i].split == split) out.push_back(static_cast<int>(i));
  return out;
}

void write_depth(const std::string& path, const Mat& depth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write " + path);
  out.write(kDepthMagic, sizeof(kDepthMagic));
  const std::uint32_t dims[3] = {static_cast<std::uint32_t>(depth.rows()),
                                 static_cast<std::uint32_t>(depth.cols()),
                                 static_cast<std::uint32_t>(sizeof(real))};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  for (Eigen::Index i = 0; i < depth.rows(); ++i)
    for (Eigen::Index j = 0; j < depth.cols(); ++j) {
      const real v = depth(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof(real));
    }
  if (!out) fail("short write to " + path);
}

Mat read_depth(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("missing depth raster " + path);
  char magic[sizeof(kDepthMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kDepthMagic, sizeof(magic)) != 0)
    fail("bad depth raster magic in " + path);
  std::uint32_t dims[3];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in || dims[2] != sizeof(real))
    fail("depth raster scalar width mismatch in " + path);
  Mat depth(dims[0], dims[1]);
  for (Eigen::Index i = 0; i < depth.rows(); ++i)
    for (Eigen::Index j = 0; j < depth.cols(); ++j) {
      real v;
      in.read(reinterpret_cast<char*>(&v), sizeof(real));
      depth(i, j) = v;
    }
  if (!in) fail("truncated depth raster " + path);
  return depth;
}

}  // namespace dusk
