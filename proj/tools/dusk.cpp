#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "dusk/checkpoint.hpp"
#include "dusk/dataset.hpp"
#include "dusk/degrade.hpp"
#include "dusk/frequency.hpp"
#include "dusk/metrics.hpp"
#include "dusk/synth.hpp"
#include "dusk/trainer.hpp"

using namespace dusk;
using nlohmann::json;

namespace {

struct CommonArgs {
  uint64_t seed = 1;
  std::string config;
  bool deterministic = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--seed", args.seed, "rng seed");
  cmd->add_option("--config", args.config, "JSON config file");
  cmd->add_flag("--deterministic", args.deterministic,
                "bit-reproducible runs for a fixed seed");
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in.good())
    throw std::runtime_error("cannot open config file: " + path);
  json j;
  in >> j;
  return j;
}

TrainConfig train_config(const json& j, const CommonArgs& common) {
  TrainConfig cfg;
  cfg.total_iters = j.value("total_iters", cfg.total_iters);
  cfg.stage1_fraction = j.value("stage1_fraction", cfg.stage1_fraction);
  cfg.alpha = j.value("alpha", cfg.alpha);
  cfg.beta_stage2 = j.value("beta_stage2", cfg.beta_stage2);
  cfg.batch_rays = j.value("batch_rays", cfg.batch_rays);
  cfg.lr_init = j.value("lr_init", cfg.lr_init);
  cfg.lr_final = j.value("lr_final", cfg.lr_final);
  cfg.blur_lr_scale = j.value("blur_lr_scale", cfg.blur_lr_scale);
  cfg.noise_lr_scale = j.value("noise_lr_scale", cfg.noise_lr_scale);
  cfg.samples.n_coarse = j.value("n_coarse", cfg.samples.n_coarse);
  cfg.samples.n_fine = j.value("n_fine", cfg.samples.n_fine);
  cfg.scene.depth = j.value("scene_depth", cfg.scene.depth);
  cfg.scene.width = j.value("scene_width", cfg.scene.width);
  cfg.scene.skip = j.value("scene_skip", cfg.scene.skip);
  cfg.scene.pos_enc.n_freq = j.value("pos_freqs", cfg.scene.pos_enc.n_freq);
  cfg.scene.dir_enc.n_freq = j.value("dir_freqs", cfg.scene.dir_enc.n_freq);
  cfg.noise.depth = j.value("noise_depth", cfg.noise.depth);
  cfg.noise.width = j.value("noise_width", cfg.noise.width);
  cfg.noise.pos_enc = cfg.scene.pos_enc;
  cfg.noise.dir_enc = cfg.scene.dir_enc;
  cfg.blur.k = j.value("blur_k", cfg.blur.k);
  cfg.blur.latent_dim = j.value("blur_latent_dim", cfg.blur.latent_dim);
  cfg.blur.embed_depth = j.value("blur_embed_depth", cfg.blur.embed_depth);
  cfg.blur.embed_width = j.value("blur_embed_width", cfg.blur.embed_width);
  cfg.blur.head_scale = j.value("blur_head_scale", cfg.blur.head_scale);
  cfg.blur.raw_translation =
      j.value("blur_raw_translation", cfg.blur.raw_translation);
  cfg.equalize = j.value("equalize", cfg.equalize);
  cfg.mask_radius = j.value("mask_radius", cfg.mask_radius);
  cfg.mask_threshold = j.value("mask_threshold", cfg.mask_threshold);
  cfg.theta = j.value("theta", cfg.theta);
  cfg.group_cap = j.value("group_cap", cfg.group_cap);
  cfg.max_groups_per_step =
      j.value("max_groups_per_step", cfg.max_groups_per_step);
  cfg.match_refresh = j.value("match_refresh", cfg.match_refresh);
  const std::string backend = j.value("match_backend", std::string("depth"));
  if (backend == "depth") {
    cfg.match_backend = MatchBackend::GroundTruth;
  } else if (backend == "ncc") {
    cfg.match_backend = MatchBackend::BlockNcc;
  } else {
    throw std::runtime_error("unknown match_backend: " + backend);
  }
  cfg.noise_before_blur = j.value("noise_before_blur", cfg.noise_before_blur);
  cfg.baseline = j.value("baseline", cfg.baseline);
  cfg.checkpoint_every = j.value("checkpoint_every", cfg.checkpoint_every);
  cfg.log_every = j.value("log_every", cfg.log_every);
  cfg.seed = common.seed;
  cfg.deterministic = common.deterministic;
  return cfg;
}

struct SynthArgs {
  std::string out;
  SynthParams params;
};

int run_synth(const SynthArgs& args, const CommonArgs& common) {
  synth_dataset(args.out, args.params, common.seed);

  json spec_json;
  spec_json["seed"] = common.seed;
  spec_json["views"] = args.params.views;
  spec_json["width"] = args.params.width;
  spec_json["height"] = args.params.height;
  spec_json["frames"] = args.params.frames;
  spec_json["shake_fraction"] = args.params.shake_fraction;
  spec_json["gamma_d"] = args.params.gamma_d;
  spec_json["gain"] = args.params.gain;
  spec_json["sigma_g"] = args.params.sigma_g;
  spec_json["sigma_p"] = args.params.sigma_p;
  spec_json["sigma_lf"] = args.params.sigma_lf;
  spec_json["lf_cells"] = args.params.lf_cells;
  std::ofstream(args.out + "/degrade.json") << spec_json.dump(2) << "\n";

  std::cout << "wrote " << args.params.views << " views to " << args.out
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"low-light deblurring radiance field toolkit"};
  app.require_subcommand(1);

  CommonArgs common;

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand(
      "synth", "generate a degraded synthetic dataset with ground truth");
  add_common(synth, common);
  synth->add_option("--out", synth_args.out, "output dataset directory")
      ->required();
  synth->add_option("--views", synth_args.params.views);
  synth->add_option("--width", synth_args.params.width);
  synth->add_option("--height", synth_args.params.height);
  synth->add_option("--frames", synth_args.params.frames,
                    "exposure frames per view");
  synth->add_option("--shake-fraction", synth_args.params.shake_fraction);
  synth->add_option("--gamma-d", synth_args.params.gamma_d);
  synth->add_option("--gain", synth_args.params.gain);
  synth->add_option("--sigma-g", synth_args.params.sigma_g);
  synth->add_option("--sigma-p", synth_args.params.sigma_p);
  synth->add_option("--sigma-lf", synth_args.params.sigma_lf,
                    "smooth per-view noise std");
  synth->add_option("--lf-cells", synth_args.params.lf_cells);
  synth->add_option("--max-rot-deg", synth_args.params.max_rot_deg,
                    "shake rotation bound in degrees");
  synth->add_option("--max-trans-fraction", synth_args.params.max_trans_fraction,
                    "shake translation bound as a fraction of scene diameter");

  std::string data_dir, out_path, checkpoint_path;
  long iters_override = -1;
  bool baseline_flag = false;
  CLI::App* train = app.add_subcommand("train", "optimize the model");
  add_common(train, common);
  train->add_option("--data", data_dir, "dataset directory")->required();
  train->add_option("--out", out_path, "checkpoint and log directory")
      ->required();
  train->add_option("--iters", iters_override, "override total iterations");
  train->add_flag("--baseline", baseline_flag,
                  "train the plain sharp model with no degradation terms");

  int view_index = 0;
  CLI::App* render = app.add_subcommand("render", "render one dataset view");
  add_common(render, common);
  render->add_option("--data", data_dir)->required();
  render->add_option("--checkpoint", checkpoint_path)->required();
  render->add_option("--view", view_index, "manifest view index");
  render->add_option("--out", out_path, "output PNG path")->required();

  std::string split = "eval";
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "score renders against clean ground truth");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--data", data_dir)->required();
  eval_cmd->add_option("--checkpoint", checkpoint_path)->required();
  eval_cmd->add_option("--split", split, "view split to score");
  eval_cmd->add_option("--out", out_path, "optional report file");

  std::string image_path;
  double mask_radius = 30, mask_threshold = 48;
  bool no_scale_up = false;
  CLI::App* mask_cmd = app.add_subcommand(
      "mask", "write the frequency-filtered informative-region mask");
  add_common(mask_cmd, common);
  mask_cmd->add_option("--image", image_path)->required();
  mask_cmd->add_option("--out", out_path, "output directory")->required();
  mask_cmd->add_option("--radius", mask_radius);
  mask_cmd->add_option("--threshold", mask_threshold);
  mask_cmd->add_flag("--no-scale-up", no_scale_up,
                     "skip the brightening preprocessing");

  int view_a = 0, view_b = 1;
  std::string backend_name = "depth";
  CLI::App* match_cmd =
      app.add_subcommand("match", "dump a dense cross-view correspondence");
  add_common(match_cmd, common);
  match_cmd->add_option("--data", data_dir)->required();
  match_cmd->add_option("--a", view_a, "source view index");
  match_cmd->add_option("--b", view_b, "target view index");
  match_cmd->add_option("--backend", backend_name, "depth | ncc");
  match_cmd->add_option("--out", out_path, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return run_synth(synth_args, common);

    if (train->parsed()) {
      const json j = load_config(common.config);
      TrainConfig cfg = train_config(j, common);
      if (iters_override > 0) cfg.total_iters = iters_override;
      if (baseline_flag) cfg.baseline = true;
      TrainSession session(load_dataset(data_dir), cfg);
      std::filesystem::create_directories(out_path);
      std::ofstream log(out_path + "/log.tsv");
      session.run(&log, out_path);
      std::cout << "finished " << session.iteration() << " iterations; final "
                << "checkpoint " << out_path << "/final.bin\n";
      return 0;
    }

    if (render->parsed()) {
      const json j = load_config(common.config);
      TrainSession session(load_dataset(data_dir), train_config(j, common));
      session.load_checkpoint(checkpoint_path);
      const DatasetManifest& manifest = session.dataset().manifest;
      if (view_index < 0 ||
          view_index >= static_cast<int>(manifest.views.size()))
        throw std::runtime_error("render: view index out of range");
      const Image img = session.render_view(
          manifest.views[static_cast<size_t>(view_index)].camera);
      write_png(out_path, img);
      std::cout << "wrote " << out_path << "\n";
      return 0;
    }

    if (eval_cmd->parsed()) {
      const json j = load_config(common.config);
      TrainSession session(load_dataset(data_dir), train_config(j, common));
      session.load_checkpoint(checkpoint_path);
      const Dataset& ds = session.dataset();
      const std::vector<int> chosen = split_indices(ds.manifest, split);
      if (chosen.empty())
        throw std::runtime_error("eval: no views in split '" + split + "'");
      std::vector<Image> renders, references;
      for (int v : chosen) {
        const Image& clean = ds.cleans[static_cast<size_t>(v)];
        if (clean.rows() == 0)
          throw std::runtime_error("eval: view lacks clean ground truth: " +
                                   ds.manifest.views[static_cast<size_t>(v)]
                                       .image_path);
        renders.push_back(session.render_view(
            ds.manifest.views[static_cast<size_t>(v)].camera));
        references.push_back(clean);
      }
      const std::string report = format_report(evaluate(renders, references));
      std::cout << report;
      if (!out_path.empty()) std::ofstream(out_path) << report;
      return 0;
    }

    if (mask_cmd->parsed()) {
      Image img = read_png(image_path);
      if (!no_scale_up) img = scale_up_auto(img);
      std::filesystem::create_directories(out_path);
      const Mat gray = grayscale(img);
      const Mat filtered =
          idft2(lowpass(dft2(gray), real(mask_radius)))
              .cwiseMax(real(0))
              .cwiseMin(real(1));
      write_png_gray(out_path + "/gray.png", gray);
      write_png_gray(out_path + "/lowpass.png", filtered);
      write_png_gray(out_path + "/mask.png",
                     ctp_mask(img, real(mask_radius), real(mask_threshold)));
      write_png_gray(out_path + "/intensity_mask.png",
                     intensity_mask(img, real(mask_threshold)));
      std::cout << "wrote masks to " << out_path << "\n";
      return 0;
    }

    if (match_cmd->parsed()) {
      const Dataset ds = load_dataset(data_dir);
      const int n = static_cast<int>(ds.manifest.views.size());
      if (view_a < 0 || view_a >= n || view_b < 0 || view_b >= n ||
          view_a == view_b)
        throw std::runtime_error("match: invalid view pair");
      MatchBackend backend;
      if (backend_name == "depth") {
        backend = MatchBackend::GroundTruth;
      } else if (backend_name == "ncc") {
        backend = MatchBackend::BlockNcc;
      } else {
        throw std::runtime_error("unknown backend: " + backend_name);
      }
      auto make_view = [&](int v) {
        MatchView mv;
        mv.image = ds.images[static_cast<size_t>(v)];
        mv.camera = ds.manifest.views[static_cast<size_t>(v)].camera;
        mv.depth = ds.depths[static_cast<size_t>(v)];
        return mv;
      };
      const ViewPairMatch m =
          match_views(make_view(view_a), make_view(view_b), backend);
      std::filesystem::create_directories(out_path);
      // flow encoded as red = matched row / rows, green = matched col / cols
      Image flow = Image::zero(static_cast<int>(m.certainty.rows()),
                               static_cast<int>(m.certainty.cols()));
      flow.r = (m.row_map / real(m.certainty.rows()))
                   .cwiseMax(real(0))
                   .cwiseMin(real(1));
      flow.g = (m.col_map / real(m.certainty.cols()))
                   .cwiseMax(real(0))
                   .cwiseMin(real(1));
      write_png(out_path + "/flow.png", flow);
      write_png_gray(out_path + "/certainty.png", m.certainty);
      std::cout << "wrote match maps to " << out_path << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
