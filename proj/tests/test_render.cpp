#include <doctest.h>

#include <random>

#include "dusk/grad_check.hpp"
#include "dusk/render.hpp"

using namespace dusk;

TEST_CASE("stratified_samples midpoints and bins") {
  std::mt19937_64 rng(1);

  Vec one = stratified_samples(0, 1, 1, false, rng);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == doctest::Approx(0.5));

  Vec four = stratified_samples(0, 2, 4, false, rng);
  Vec want(4);
  want << 0.25, 0.75, 1.25, 1.75;
  CHECK((four - want).cwiseAbs().maxCoeff() < 1e-12);

  // jittered samples stay inside their bins
  const int n = 8;
  const real near = 1, far = 5, w = (far - near) / n;
  for (int rep = 0; rep < 1250; ++rep) {
    Vec t = stratified_samples(near, far, n, true, rng);
    for (int i = 0; i < n; ++i) {
      CHECK(t[i] >= near + i * w);
      CHECK(t[i] < near + (i + 1) * w);
    }
  }

  CHECK_THROWS_AS(stratified_samples(1, 1, 4, false, rng), std::invalid_argument);
}

TEST_CASE("volume_render closed-form cases") {
  SUBCASE("empty space renders black with unit transmittance") {
    Vec t(3);
    t << 1, 2, 3;
    RenderResult r = volume_render(t, 4, Mat::Ones(3, 3), Vec::Zero(3));
    CHECK(r.color.norm() == 0);
    CHECK((r.transmittance.array() == 1).all());
    CHECK(r.weights.norm() == 0);
  }

  SUBCASE("two samples with sigma*delta = ln 2 each") {
    Vec t(2);
    t << 0, 1;
    Mat colors(2, 3);
    colors << 1, 0, 0, 0, 1, 0;
    Vec sigma = Vec::Constant(2, std::log(real(2)));
    RenderResult r = volume_render(t, 2, colors, sigma);  // delta = (1, 1)
    CHECK(r.weights[0] == doctest::Approx(0.5));
    CHECK(r.weights[1] == doctest::Approx(0.25));
    CHECK(r.color.x() == doctest::Approx(0.5));
    CHECK(r.color.y() == doctest::Approx(0.25));
    CHECK(r.color.z() == doctest::Approx(0.0));
  }
}

TEST_CASE("volume rendering identities on random rays") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = 2 + int(u(rng) * 14);
    Vec t = stratified_samples(real(0.5), 6, n, true, rng);
    Vec sigma(n);
    for (int i = 0; i < n; ++i) sigma[i] = real(3 * u(rng));
    Mat colors = (Mat::Random(n, 3).array() + 1) / 2;
    RenderResult r = volume_render(t, 6, colors, sigma);

    const Vec delta = interval_widths(t, 6);
    const real wsum = r.weights.sum();
    CHECK(std::abs(wsum - (1 - std::exp(-sigma.dot(delta)))) < 1e-12);
    CHECK(wsum <= 1 + 1e-12);
    for (int i = 1; i < n; ++i) {
      CHECK(r.transmittance[i] <= r.transmittance[i - 1] + 1e-15);
      CHECK(r.transmittance[i] >= 0);
      CHECK(r.transmittance[i] <= 1);
    }
  }
}

TEST_CASE("interval split invariance for constant color and sigma") {
  Vec t(3);
  t << 1, 2, 3;
  Mat colors = Mat::Ones(3, 3) * real(0.6);
  Vec sigma = Vec::Constant(3, real(0.8));
  RenderResult a = volume_render(t, 4, colors, sigma);

  // split the middle interval [2,3) in two at 2.5 with the same sigma
  Vec t2(4);
  t2 << 1, 2, 2.5, 3;
  Mat colors2 = Mat::Ones(4, 3) * real(0.6);
  Vec sigma2 = Vec::Constant(4, real(0.8));
  RenderResult b = volume_render(t2, 4, colors2, sigma2);
  CHECK((a.color - b.color).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("volume_render_graph matches the plain path and finite differences") {
  std::mt19937_64 rng(5);
  const int rays = 4, n = 6;
  Mat delta = (Mat::Random(rays, n).array() + real(1.5)).matrix() * real(0.2);

  ParameterStore store;
  int sid = store.add("sigma", rays * n, 1);
  int cid = store.add("color", rays * n, 3);
  store.block(sid).value = (Mat::Random(rays * n, 1).array() + 1).matrix();
  store.block(cid).value = (Mat::Random(rays * n, 3).array() + 1).matrix() / 2;

  Tape t(&store);
  Tape::Id pix = volume_render_graph(t, t.param(sid), t.param(cid), delta);

  // per-ray plain evaluation
  for (int r = 0; r < rays; ++r) {
    Vec tt(n);
    real acc = 0;
    for (int i = 0; i < n; ++i) {
      tt[i] = acc;
      acc += delta(r, i);
    }
    RenderResult want = volume_render(
        tt, acc, store.block(cid).value.middleRows(r * n, n),
        store.block(sid).value.col(0).segment(r * n, n));
    CHECK((t.val(pix).row(r).transpose() - want.color).cwiseAbs().maxCoeff() <
          1e-12);
  }

  auto build = [&](Tape& tp) {
    Tape::Id p = volume_render_graph(tp, tp.param(sid), tp.param(cid), delta);
    return tp.scale_const(tp.sum(tp.mul(p, p)), real(1) / real(rays));
  };
  CHECK(grad_check(store, build, real(1e-6)) < 1e-5);
}

TEST_CASE("hierarchical_resample distributions") {
  std::mt19937_64 rng(7);

  SUBCASE("single hot bin captures every sample") {
    Vec w = Vec::Zero(8);
    w[5] = real(2.5);
    Vec s = hierarchical_resample(w, 0, 8, 64, rng);
    for (int i = 0; i < s.size(); ++i) {
      CHECK(s[i] >= 5);
      CHECK(s[i] < 6);
    }
  }

  SUBCASE("zero weights fall back to uniform") {
    Vec s = hierarchical_resample(Vec::Zero(4), 0, 1, 4000, rng);
    CHECK(s.minCoeff() >= 0);
    CHECK(s.maxCoeff() < 1);
    // crude spread check: each quartile bin gets a fair share
    int counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < s.size(); ++i) counts[int(s[i] * 4)]++;
    for (int b = 0; b < 4; ++b) CHECK(counts[b] > 800);
  }

  SUBCASE("uniform weights give a uniform empirical distribution") {
    const int bins = 10, draws = 100000;
    Vec w = Vec::Ones(bins);
    int counts[bins] = {};
    for (int chunk = 0; chunk < draws / 100; ++chunk) {
      Vec s = hierarchical_resample(w, 0, 1, 100, rng);
      for (int i = 0; i < s.size(); ++i) counts[int(s[i] * bins)]++;
    }
    real chi2 = 0;
    const real expected = real(draws) / bins;
    for (int b = 0; b < bins; ++b) {
      const real d = counts[b] - expected;
      chi2 += d * d / expected;
    }
    // chi-square critical value, 9 dof, 1% significance
    CHECK(chi2 < real(21.67));
  }

  SUBCASE("sorted output merges cleanly with coarse samples") {
    Vec coarse = stratified_samples(0, 1, 8, true, rng);
    Vec fine = hierarchical_resample(Vec::Ones(8), 0, 1, 8, rng);
    Vec merged = merge_sorted(coarse, fine);
    REQUIRE(merged.size() == 16);
    for (int i = 1; i < 16; ++i) CHECK(merged[i] >= merged[i - 1]);
  }
}
