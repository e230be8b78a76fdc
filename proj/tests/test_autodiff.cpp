#include <doctest.h>

#include <cmath>
#include <random>

#include "dusk/checkpoint.hpp"
#include "dusk/encoding.hpp"
#include "dusk/grad_check.hpp"
#include "dusk/mlp.hpp"
#include "dusk/render.hpp"
#include "dusk/tape.hpp"

using namespace dusk;

namespace {

// independent scalar-loop oracle for the frequency encoding
Vec encode_oracle(const Vec& p, const EncodingConfig& cfg) {
  std::vector<real> out;
  if (cfg.include_input)
    for (int i = 0; i < p.size(); ++i) out.push_back(p[i]);
  for (int j = 0; j < cfg.n_freq; ++j) {
    const real f = std::pow(real(2), j) * real(EIGEN_PI);
    for (int i = 0; i < p.size(); ++i) out.push_back(std::sin(f * p[i]));
    for (int i = 0; i < p.size(); ++i) out.push_back(std::cos(f * p[i]));
  }
  return Eigen::Map<Vec>(out.data(), static_cast<long>(out.size()));
}

}  // namespace

TEST_CASE("positional_encode matches stated small cases") {
  Vec p0(1);
  p0 << 0;
  Vec e0 = positional_encode(p0, {2, false});
  REQUIRE(e0.size() == 4);
  CHECK(e0[0] == doctest::Approx(0));
  CHECK(e0[1] == doctest::Approx(1));
  CHECK(e0[2] == doctest::Approx(0));
  CHECK(e0[3] == doctest::Approx(1));

  Vec ph(1);
  ph << 0.5;
  Vec eh = positional_encode(ph, {1, false});
  REQUIRE(eh.size() == 2);
  CHECK(eh[0] == doctest::Approx(1));
  CHECK(eh[1] == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("positional_encode matches scalar-loop oracle and unit pairs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  EncodingConfig cfg{10, true};
  for (int rep = 0; rep < 20; ++rep) {
    Vec p(3);
    for (int i = 0; i < 3; ++i) p[i] = real(u(rng));
    Vec got = positional_encode(p, cfg);
    Vec want = encode_oracle(p, cfg);
    REQUIRE(got.size() == want.size());
    REQUIRE(got.size() == cfg.encoded_width(3));
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-14);
    // sin^2 + cos^2 per frequency pair
    for (int j = 0; j < cfg.n_freq; ++j)
      for (int i = 0; i < 3; ++i) {
        const real s = got[3 + j * 6 + i];
        const real c = got[3 + j * 6 + 3 + i];
        CHECK(std::abs(s * s + c * c - 1) < 1e-12);
      }
  }
}

TEST_CASE("mlp_forward degenerate and composed cases") {
  std::mt19937_64 rng(3);

  SUBCASE("zero weights pass the bias through the activation") {
    ParameterStore store;
    Mlp mlp(store, "m", {{3, 2, Activation::Sigmoid}}, rng);
    store.block("m/W0").value.setZero();
    store.block("m/b0").value << real(0.3), real(-1.2);
    Mat x = Mat::Random(5, 3);
    Mat y = mlp.forward(x);
    for (int i = 0; i < 5; ++i) {
      CHECK(y(i, 0) == doctest::Approx(1 / (1 + std::exp(-0.3))));
      CHECK(y(i, 1) == doctest::Approx(1 / (1 + std::exp(1.2))));
    }
  }

  SUBCASE("identity layer is the identity") {
    ParameterStore store;
    Mlp mlp(store, "m", {{4, 4, Activation::None}}, rng);
    store.block("m/W0").value = Mat::Identity(4, 4);
    store.block("m/b0").value.setZero();
    Mat x = Mat::Random(3, 4);
    CHECK((mlp.forward(x) - x).cwiseAbs().maxCoeff() < 1e-15);
  }

  SUBCASE("two random layers equal hand-composed matrix products") {
    ParameterStore store;
    Mlp mlp(store, "m", {{3, 5, Activation::Relu}, {5, 2, Activation::None}},
            rng);
    Mat x = Mat::Random(7, 3);
    Mat h = (x * store.block("m/W0").value).rowwise() +
            store.block("m/b0").value.row(0);
    h = h.cwiseMax(real(0));
    Mat want = (h * store.block("m/W1").value).rowwise() +
               store.block("m/b1").value.row(0);
    CHECK((mlp.forward(x) - want).cwiseAbs().maxCoeff() < 1e-14);
  }

  SUBCASE("input width mismatch is a configuration error") {
    ParameterStore store;
    Mlp mlp(store, "m", {{3, 2, Activation::None}}, rng);
    CHECK_THROWS_AS(mlp.forward(Mat::Random(2, 4)), std::invalid_argument);
  }

  SUBCASE("tape forward equals plain forward") {
    ParameterStore store;
    Mlp mlp(store, "m",
            {{3, 8, Activation::Relu}, {8, 4, Activation::Softplus}}, rng);
    Mat x = Mat::Random(6, 3);
    Tape t(&store);
    Tape::Id y = mlp.forward(t, t.constant(x));
    CHECK((t.val(y) - mlp.forward(x)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("backward on elementary functions") {
  ParameterStore store;
  int wid = store.add("w", 1, 1);

  SUBCASE("f(w) = w*x with x=2") {
    store.block(wid).value(0, 0) = real(1.5);
    Tape t(&store);
    Tape::Id loss = t.mul(t.param(wid), t.scalar(2));
    t.backward(loss);
    CHECK(store.block(wid).grad(0, 0) == doctest::Approx(2));
  }

  SUBCASE("f(w) = w^2 at w=3") {
    store.block(wid).value(0, 0) = 3;
    Tape t(&store);
    Tape::Id w = t.param(wid);
    t.backward(t.mul(w, w));
    CHECK(store.block(wid).grad(0, 0) == doctest::Approx(6));
  }

  SUBCASE("non-scalar loss is a contract violation") {
    Tape t(&store);
    Tape::Id v = t.constant(Mat::Ones(2, 2));
    CHECK_THROWS_AS(t.backward(v), std::invalid_argument);
  }

  SUBCASE("non-trainable blocks receive no gradient") {
    int fixed = store.add("fixed", 1, 1, /*trainable=*/false);
    store.block(fixed).value(0, 0) = 2;
    Tape t(&store);
    t.backward(t.mul(t.param(fixed), t.param(fixed)));
    CHECK(store.block(fixed).grad(0, 0) == 0);
  }
}

TEST_CASE("backward linearity: grad(a f + b g) = a grad f + b grad g") {
  std::mt19937_64 rng(5);
  ParameterStore store;
  int wid = store.add("w", 4, 3);
  store.block(wid).value = Mat::Random(4, 3);
  const real a = real(0.7), b = real(-2.3);
  Mat x = Mat::Random(3, 2);

  auto f = [&](Tape& t) {
    return t.sum(t.sin(t.matmul(t.param(wid), t.constant(x))));
  };
  auto g = [&](Tape& t) {
    return t.sum(t.mul(t.param(wid), t.param(wid)));
  };

  store.zero_grad();
  {
    Tape t(&store);
    t.backward(f(t));
  }
  Mat gf = store.block(wid).grad;
  store.zero_grad();
  {
    Tape t(&store);
    t.backward(g(t));
  }
  Mat gg = store.block(wid).grad;
  store.zero_grad();
  {
    Tape t(&store);
    t.backward(t.add(t.scale_const(f(t), a), t.scale_const(g(t), b)));
  }
  CHECK((store.block(wid).grad - (a * gf + b * gg)).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("grad_check oracles") {
  SUBCASE("sum of squares is exact") {
    ParameterStore store;
    int wid = store.add("w", 5, 1);
    store.block(wid).value = Mat::Random(5, 1);
    real err = grad_check(
        store, [&](Tape& t) { return t.sum(t.mul(t.param(wid), t.param(wid))); },
        real(1e-6));
    CHECK(err < 1e-8);
  }

  SUBCASE("mlp + volume render + mse composite") {
    std::mt19937_64 rng(17);
    ParameterStore store;
    Mlp mlp(store, "f", {{2, 8, Activation::Relu}, {8, 4, Activation::None}},
            rng);
    const int rays = 3, n = 4;
    Mat x = Mat::Random(rays * n, 2);
    Mat delta = (Mat::Random(rays, n).array() + real(1.5)).matrix() * real(0.1);
    Mat target = Mat::Random(rays, 3);
    auto build = [&](Tape& t) {
      Tape::Id out = mlp.forward(t, t.constant(x));
      Tape::Id sigma = t.softplus(t.block(out, 0, 3, rays * n, 1));
      Tape::Id color = t.sigmoid(t.block(out, 0, 0, rays * n, 3));
      Tape::Id pix = volume_render_graph(t, sigma, color, delta);
      Tape::Id d = t.sub(pix, t.constant(target));
      return t.scale_const(t.sum(t.mul(d, d)), real(1) / real(rays * 3));
    };
    CHECK(grad_check(store, build, real(1e-6)) < 1e-5);
  }

  SUBCASE("dead parameter reports zero error") {
    ParameterStore store;
    int wid = store.add("w", 1, 1);
    int dead = store.add("unused", 1, 1);
    store.block(wid).value(0, 0) = 1;
    store.block(dead).value(0, 0) = 5;
    real err = grad_check(
        store, [&](Tape& t) { return t.mul(t.param(wid), t.param(wid)); },
        real(1e-6));
    CHECK(err < 1e-8);
    CHECK(store.block(dead).grad(0, 0) == 0);
  }

  SUBCASE("eps must be positive") {
    ParameterStore store;
    store.add("w", 1, 1);
    CHECK_THROWS_AS(
        grad_check(store, [&](Tape& t) { return t.scalar(0); }, real(0)),
        std::invalid_argument);
  }
}

TEST_CASE("forward evaluation is bit-deterministic") {
  std::mt19937_64 rng(23);
  ParameterStore store;
  Mlp mlp(store, "m", {{3, 16, Activation::Relu}, {16, 3, Activation::Sigmoid}},
          rng);
  Mat x = Mat::Random(10, 3);
  Mat y1 = mlp.forward(x);
  Mat y2 = mlp.forward(x);
  CHECK(std::memcmp(y1.data(), y2.data(), sizeof(real) * y1.size()) == 0);
}

TEST_CASE("checkpoint round-trips bit-exactly") {
  std::mt19937_64 rng(31);
  ParameterStore store;
  Mlp mlp(store, "m", {{3, 8, Activation::Relu}, {8, 2, Activation::None}},
          rng);
  store.add("latent", 4, 2, /*trainable=*/false);
  store.block("latent").value = Mat::Random(4, 2);

  const std::string path = "ckpt_roundtrip.bin";
  save_checkpoint(store, 1234, path);

  ParameterStore loaded;
  uint64_t it = load_checkpoint(loaded, path);
  CHECK(it == 1234);
  REQUIRE(loaded.size() == store.size());
  for (int i = 0; i < store.size(); ++i) {
    const auto& a = store.block(i);
    const auto& b = loaded.block(i);
    CHECK(a.name == b.name);
    CHECK(a.trainable == b.trainable);
    REQUIRE(a.value.rows() == b.value.rows());
    REQUIRE(a.value.cols() == b.value.cols());
    CHECK(std::memcmp(a.value.data(), b.value.data(),
                      sizeof(real) * a.value.size()) == 0);
  }
  std::remove(path.c_str());
}

TEST_CASE("tape structural ops backward against finite differences") {
  ParameterStore store;
  int wid = store.add("w", 3, 4);
  store.block(wid).value = Mat::Random(3, 4);
  auto build = [&](Tape& t) {
    Tape::Id w = t.param(wid);
    Tape::Id r = t.reshape(w, 4, 3);
    Tape::Id rep = t.repeat_rows(r, 2);
    Tape::Id c = t.concat_cols(rep, t.exp(t.scale_const(rep, real(0.5))));
    Tape::Id cs = t.cumsum_excl_rows(c);
    Tape::Id rs = t.row_sum(t.sigmoid(cs));
    Tape::Id dv = t.div_col(t.mul_col(c, rs), t.add_const(rs, real(3)));
    Tape::Id tr = t.transpose(t.col_sum(dv));
    Tape::Id bl = t.block(dv, 1, 1, 4, 3);
    return t.add(t.sum(t.abs(bl)), t.sum(t.sqrt(t.add_const(t.mul(tr, tr), 1))));
  };
  CHECK(grad_check(store, build, real(1e-6)) < 1e-6);
}

TEST_CASE("rotation coefficient ops are smooth across the series cut") {
  ParameterStore store;
  int wid = store.add("s", 1, 1);
  for (real s0 : {real(1e-9), real(1e-7), real(5e-7), real(2e-6), real(0.3)}) {
    store.block(wid).value(0, 0) = s0;
    auto build = [&](Tape& t) {
      Tape::Id s = t.param(wid);
      return t.sum(t.add(t.rot_a(s), t.add(t.rot_b(s), t.rot_c(s))));
    };
    CHECK(grad_check(store, build, real(1e-7)) < 1e-5);
  }
}
