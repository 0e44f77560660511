#include "hpk/kernel.hpp"

#include <iostream>

namespace hpk {

Kernel::Kernel() : store_(std::make_unique<Store>()), interp_(*this), in_(&std::cin), out_(&std::cout) {
  installStandardLibrary();
}

Kernel::~Kernel() = default;

}  // namespace hpk
