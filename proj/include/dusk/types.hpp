#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace dusk {

#ifdef DUSK_REAL_FLOAT
using real = float;
#else
using real = double;
#endif

using Mat = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<real, Eigen::Dynamic, 1>;
using Vec2 = Eigen::Matrix<real, 2, 1>;
using Vec3 = Eigen::Matrix<real, 3, 1>;
using Mat3 = Eigen::Matrix<real, 3, 3>;
using Mat34 = Eigen::Matrix<real, 3, 4>;
using CMat = Eigen::Matrix<std::complex<real>, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace dusk
