#pragma once

#include "daelab/consistency.hpp"
#include "daelab/index.hpp"
#include "daelab/io.hpp"
#include "daelab/node.hpp"
#include "daelab/pde_example.hpp"
#include "daelab/pencil.hpp"
#include "daelab/ph.hpp"
#include "daelab/simulate.hpp"
#include "daelab/subspace.hpp"

namespace daelab {
inline constexpr const char* kVersion = "0.1.0";
}
