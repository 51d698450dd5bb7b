#pragma once

#include <fstream>
#include <random>
#include <string>

#include <json.hpp>

#include "nfmusic/types.hpp"

namespace testing {

inline nlohmann::json golden() {
  std::ifstream in(std::string(NFMUSIC_TEST_DATA) + "/golden.json");
  return nlohmann::json::parse(in);
}

inline nfmusic::CMatrix random_matrix(int rows, int cols, std::mt19937_64& eng) {
  std::normal_distribution<double> g(0.0, 1.0);
  nfmusic::CMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double re = g(eng);
    const double im = g(eng);
    out.data()[i] = {re, im};
  }
  return out;
}

}  // namespace testing
