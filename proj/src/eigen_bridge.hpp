#pragma once

#include <Eigen/Dense>

#include "g2forge/tensor.hpp"

namespace g2forge {

using Mat7 = Eigen::Matrix<double, 7, 7, Eigen::RowMajor>;
using Vec7 = Eigen::Matrix<double, 7, 1>;

inline Mat7 to_eigen(const Mat& a) { return Eigen::Map<const Mat7>(a.data()); }

inline Mat from_eigen(const Mat7& a) {
  Mat out;
  Eigen::Map<Mat7>(out.data()) = a;
  return out;
}

inline Vec7 to_eigen(const Vec& a) { return Eigen::Map<const Vec7>(a.data()); }

inline Vec from_eigen(const Vec7& a) {
  Vec out;
  Eigen::Map<Vec7>(out.data()) = a;
  return out;
}

}  // namespace g2forge
