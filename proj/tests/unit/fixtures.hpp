#pragma once

#include <Eigen/Dense>

#include "wordldp/sources.hpp"

namespace fx {

inline wordldp::LetterSource markov_example() {
  Eigen::MatrixXd t(2, 2);
  t << 0.7, 0.3, 0.4, 0.6;
  return wordldp::LetterSource::markov(2, 1, t);
}

inline wordldp::LetterSource uniform2() { return wordldp::LetterSource::iid({0.5, 0.5}); }

}  // namespace fx
