#pragma once

#include <fstream>
#include <sstream>

#include "huro/world.hpp"

inline huro::world::CourseMap bench_course() {
  std::ifstream in(std::string(HURO_COURSE_DIR) + "/three_obstacles.json");
  std::stringstream ss;
  ss << in.rdbuf();
  return *huro::world::load_course(ss.str());
}
