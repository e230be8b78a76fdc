#include "dusk/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace dusk {

real grad_check(ParameterStore& store, const LossBuilder& build, real eps,
                int max_coords_per_block, uint64_t seed, real denom_floor) {
  if (!(eps > 0)) throw std::invalid_argument("grad_check: eps must be > 0");
  if (!(denom_floor > 0))
    throw std::invalid_argument("grad_check: denom_floor must be > 0");

  store.zero_grad();
  {
    Tape t(&store);
    t.backward(build(t));
  }

  auto eval = [&]() -> real {
    Tape t(&store);
    return t.scalar_val(build(t));
  };

  std::mt19937_64 rng(seed);
  real worst = 0;
  for (int bi = 0; bi < store.size(); ++bi) {
    ParamBlock& b = store.block(bi);
    if (!b.trainable || b.value.size() == 0) continue;
    const long n = b.value.size();
    std::vector<long> coords;
    if (n <= max_coords_per_block) {
      for (long k = 0; k < n; ++k) coords.push_back(k);
    } else {
      std::uniform_int_distribution<long> dist(0, n - 1);
      for (int k = 0; k < max_coords_per_block; ++k) coords.push_back(dist(rng));
    }
    for (long k : coords) {
      real* p = b.value.data() + k;
      const real saved = *p;
      *p = saved + eps;
      const real lp = eval();
      *p = saved - eps;
      const real lm = eval();
      *p = saved;
      const real fd = (lp - lm) / (2 * eps);
      const real an = b.grad.data()[k];
      const real err =
          std::abs(an - fd) / std::max(denom_floor, std::abs(an) + std::abs(fd));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace dusk
