#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace aopnpl {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat2x6 = Eigen::Matrix<double, 2, 6>;
using Mat9x3 = Eigen::Matrix<double, 9, 3>;
using Mat6x12 = Eigen::Matrix<double, 6, 12>;
using Mat12 = Eigen::Matrix<double, 12, 12>;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

}  // namespace aopnpl
