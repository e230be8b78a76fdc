#include "dusk/trainer.hpp"

#include <filesystem>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "dusk/checkpoint.hpp"
#include "dusk/degrade.hpp"
#include "dusk/frequency.hpp"

namespace dusk {

Schedule schedule(long iteration, const TrainConfig& cfg) {
  if (cfg.total_iters < 1)
    throw std::invalid_argument("schedule: total_iters must be >= 1");
  if (iteration < 0 || iteration >= cfg.total_iters)
    throw std::invalid_argument("schedule: iteration out of range");
  Schedule s;
  s.alpha = cfg.alpha;
  s.beta = iteration >= stage_boundary(cfg) ? cfg.beta_stage2 : 0;
  if (cfg.total_iters == 1 || cfg.lr_init == cfg.lr_final) {
    s.lr = cfg.lr_init;
  } else {
    const real frac = real(iteration) / real(cfg.total_iters - 1);
    s.lr = cfg.lr_init * std::pow(cfg.lr_final / cfg.lr_init, frac);
  }
  return s;
}

real reconstruction_loss(const Mat& predicted, const Mat& target) {
  if (predicted.rows() != target.rows() || predicted.cols() != target.cols())
    throw std::invalid_argument("reconstruction_loss: shape mismatch");
  if (predicted.size() == 0)
    throw std::invalid_argument("reconstruction_loss: empty batch");
  return (predicted - target).array().square().mean();
}

Adam::Adam(ParameterStore& store, real beta1, real beta2, real eps)
    : store_(&store), beta1_(beta1), beta2_(beta2), eps_(eps) {
  const int n = store.size();
  for (int i = 0; i < n; ++i) {
    const ParamBlock& b = store.block(i);
    if (!b.trainable) continue;
    Slot s;
    s.param = i;
    const std::string mn = "adam/m/" + b.name;
    const std::string vn = "adam/v/" + b.name;
    s.m = store.find(mn);
    if (s.m < 0)
      s.m = store.add(mn, static_cast<int>(b.value.rows()),
                      static_cast<int>(b.value.cols()), false);
    s.v = store.find(vn);
    if (s.v < 0)
      s.v = store.add(vn, static_cast<int>(b.value.rows()),
                      static_cast<int>(b.value.cols()), false);
    slots_.push_back(s);
  }
}

void Adam::scale_group(const std::string& prefix, real scale) {
  if (store_ == nullptr) throw std::logic_error("Adam: not attached");
  for (Slot& s : slots_)
    if (store_->block(s.param).name.rfind(prefix, 0) == 0) s.scale = scale;
}

void Adam::step(real lr, long t) {
  if (store_ == nullptr) throw std::logic_error("Adam: not attached");
  if (t < 1) throw std::invalid_argument("Adam: update count starts at 1");
  const real c1 = 1 - std::pow(beta1_, real(t));
  const real c2 = 1 - std::pow(beta2_, real(t));
  for (const Slot& s : slots_) {
    ParamBlock& p = store_->block(s.param);
    Mat& m = store_->block(s.m).value;
    Mat& v = store_->block(s.v).value;
    m = beta1_ * m + (1 - beta1_) * p.grad;
    v = beta2_ * v + (1 - beta2_) * p.grad.array().square().matrix();
    p.value.array() -=
        lr * s.scale * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  }
}

TrainSession::TrainSession(Dataset dataset, const TrainConfig& cfg)
    : cfg_(cfg), dataset_(std::move(dataset)) {
  if (cfg_.stage1_fraction <= 0 || cfg_.stage1_fraction >= 1)
    throw std::invalid_argument("train: stage1_fraction must be in (0,1)");
  if (cfg_.batch_rays < 1)
    throw std::invalid_argument("train: batch must hold at least one ray");

  train_views_ = split_indices(dataset_.manifest, "train");
  if (train_views_.empty())
    throw std::invalid_argument("train: dataset has no training views");
  for (int v : train_views_) {
    cameras_.push_back(dataset_.manifest.views[static_cast<size_t>(v)].camera);
    const Image& raw = dataset_.images[static_cast<size_t>(v)];
    preprocessed_.push_back(scale_up_auto(raw, cfg_.equalize));
    masks_.push_back(
        ctp_mask(preprocessed_.back(), cfg_.mask_radius, cfg_.mask_threshold));
  }

  std::mt19937_64 init_rng(cfg_.seed);
  scene_ = SceneField(store_, "scene", cfg_.scene, init_rng);
  noise_ = NoiseField(store_, "noise", cfg_.noise, init_rng);
  blur_ = BlurKernelNet(store_, "blur",
                        static_cast<int>(train_views_.size()), cfg_.blur,
                        init_rng);
  models_.scene = &scene_;
  models_.noise = &noise_;
  models_.blur = &blur_;
  models_.noise_before_blur = cfg_.noise_before_blur;
  adam_ = Adam(store_);
  if (cfg_.blur_lr_scale != 1) adam_.scale_group("blur/", cfg_.blur_lr_scale);
  if (cfg_.noise_lr_scale != 1)
    adam_.scale_group("noise/", cfg_.noise_lr_scale);
}

std::mt19937_64 TrainSession::step_rng() const {
  std::seed_seq seq{cfg_.seed, static_cast<uint64_t>(iteration_),
                    uint64_t(0x9e3779b97f4a7c15ULL)};
  return std::mt19937_64(seq);
}

void TrainSession::refresh_matches() {
  std::vector<MatchView> views;
  for (size_t i = 0; i < train_views_.size(); ++i) {
    MatchView mv;
    mv.image = preprocessed_[i];
    mv.camera = cameras_[i];
    mv.depth = dataset_.depths[static_cast<size_t>(train_views_[i])];
    if (cfg_.match_backend == MatchBackend::GroundTruth && mv.depth.size() == 0)
      throw std::invalid_argument(
          "train: depth-based matching needs per-view depth rasters");
    views.push_back(std::move(mv));
  }
  table_ = build_match_table(views, cfg_.match_backend);
  have_table_ = true;
}

std::vector<Ray> TrainSession::sample_batch(Mat& targets,
                                            std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick_view(
      0, static_cast<int>(train_views_.size()) - 1);
  std::vector<Ray> rays;
  targets.resize(cfg_.batch_rays, 3);
  for (int b = 0; b < cfg_.batch_rays; ++b) {
    const int v = pick_view(rng);
    const Camera& cam = cameras_[static_cast<size_t>(v)];
    std::uniform_int_distribution<int> pick_row(0, cam.height - 1);
    std::uniform_int_distribution<int> pick_col(0, cam.width - 1);
    const int i = pick_row(rng);
    const int j = pick_col(rng);
    rays.push_back(pixel_ray(cam, v, i, j));
    targets.row(b) =
        preprocessed_[static_cast<size_t>(v)].pixel(i, j).transpose();
  }
  return rays;
}

TrainSession::StepStats TrainSession::step() {
  if (iteration_ >= cfg_.total_iters)
    throw std::logic_error("train: all iterations already run");
  const Schedule s = schedule(iteration_, cfg_);
  std::mt19937_64 rng = step_rng();

  const bool want_groups = !cfg_.baseline && s.beta > 0;
  if (want_groups &&
      (!have_table_ ||
       (cfg_.match_refresh > 0 && iteration_ % cfg_.match_refresh == 0)))
    refresh_matches();

  Mat targets;
  const std::vector<Ray> batch = sample_batch(targets, rng);
  const PipelineCache cache = build_pipeline_cache(
      models_, cfg_.samples, batch, targets, dataset_.manifest.near,
      dataset_.manifest.far, cfg_.baseline ? std::vector<Mat>{} : masks_,
      want_groups ? &table_ : nullptr, cameras_, cfg_.theta, cfg_.group_cap,
      cfg_.max_groups_per_step, rng);

  Tape t(&store_);
  const PipelineGraph g =
      cfg_.baseline ? build_sharp_graph(t, scene_, cache)
                    : build_pipeline_graph(t, models_, cache, s.alpha, s.beta);
  store_.zero_grad();
  t.backward(g.total);
  adam_.step(s.lr, iteration_ + 1);
  ++iteration_;

  StepStats stats;
  stats.recon = t.scalar_val(g.recon_loss);
  stats.consistency = t.scalar_val(g.consistency);
  stats.lr = s.lr;
  return stats;
}

void TrainSession::run(std::ostream* log, const std::string& checkpoint_dir) {
  if (!checkpoint_dir.empty())
    std::filesystem::create_directories(checkpoint_dir);
  while (iteration_ < cfg_.total_iters) {
    const StepStats stats = step();
    const bool last = iteration_ == cfg_.total_iters;
    if (log != nullptr &&
        (last || (cfg_.log_every > 0 && iteration_ % cfg_.log_every == 0))) {
      std::ostringstream row;
      row << iteration_ << '\t' << std::scientific << std::setprecision(9)
          << stats.recon << '\t' << stats.consistency << '\t' << stats.lr
          << '\n';
      (*log) << row.str();
    }
    if (!checkpoint_dir.empty() &&
        (last || (cfg_.checkpoint_every > 0 &&
                  iteration_ % cfg_.checkpoint_every == 0))) {
      std::ostringstream name;
      name << checkpoint_dir << "/ckpt_" << std::setw(6) << std::setfill('0')
           << iteration_ << ".bin";
      save_checkpoint(name.str());
      if (last) save_checkpoint(checkpoint_dir + "/final.bin");
    }
  }
}

void TrainSession::save_checkpoint(const std::string& path) const {
  dusk::save_checkpoint(store_, static_cast<uint64_t>(iteration_), path);
}

void TrainSession::load_checkpoint(const std::string& path) {
  iteration_ = static_cast<long>(dusk::load_checkpoint(store_, path));
}

Image TrainSession::render_view(const Camera& cam) const {
  SampleConfig scfg = cfg_.samples;
  scfg.jitter = false;
  std::mt19937_64 rng(cfg_.seed);
  return render_novel(scene_, cam, scfg, rng);
}

}  // namespace dusk
