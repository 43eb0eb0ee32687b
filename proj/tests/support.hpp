#pragma once

#include <initializer_list>

#include "spherebound/linalg.hpp"

namespace spherebound::test {

inline QMatrix qmat(std::initializer_list<std::initializer_list<Rational>> rows) {
  QMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (const auto& v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace spherebound::test
