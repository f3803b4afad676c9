#include "sphf/parallel.hpp"

namespace sphf::par {

bool& enabled_flag() {
  static bool flag = true;
  return flag;
}

}  // namespace sphf::par
