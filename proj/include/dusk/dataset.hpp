#pragma once

#include <string>
#include <vector>

#include "dusk/geometry.hpp"
#include "dusk/image.hpp"

namespace dusk {

struct DatasetView {
  std::string image_path;  // relative to the dataset directory
  Camera camera;
  std::string split = "train";  // "train" | "eval"
  std::string depth_path;       // optional z-depth raster
  std::string clean_path;       // optional ground-truth image
};

struct DatasetManifest {
  real near = 0;
  real far = 0;
  std::vector<DatasetView> views;
};

// Everything referenced by the manifest, fully loaded; a dataset either
// loads completely or the load throws naming the offending entry.
struct Dataset {
  DatasetManifest manifest;
  std::vector<Image> images;
  std::vector<Mat> depths;    // empty Mat where the view has none
  std::vector<Image> cleans;  // zero-size where the view has none
};

// Line-based text manifest "manifest.txt": header, near/far, then one
// `view` record per line (image path, 12 row-major pose numbers,
// intrinsics, split tag, optional depth= and clean= paths).
void save_manifest(const std::string& dir, const DatasetManifest& manifest);
DatasetManifest load_manifest(const std::string& dir);
Dataset load_dataset(const std::string& dir);

std::vector<int> split_indices(const DatasetManifest& manifest,
                               const std::string& split);

// Every 7th view evaluates: 21 views split 18 train / 3 eval.
inline std::string default_split_tag(int view_index) {
  return (view_index + 1) % 7 == 0 ? "eval" : "train";
}

// Binary z-depth raster (magic, dims, scalar width, raw values).
void write_depth(const std::string& path, const Mat& depth);
Mat read_depth(const std::string& path);

}  // namespace dusk
