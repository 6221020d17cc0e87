#include <gtest/gtest.h>

#include "tpinv/spectral.hpp"

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  tpinv::spectral::set_symmetry_checks(true);
  return RUN_ALL_TESTS();
}
