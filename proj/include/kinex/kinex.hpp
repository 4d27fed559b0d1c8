#pragma once

// Core model headers. io.hpp, manifest.hpp and commands.hpp additionally need
// nlohmann/json and are included separately.

#include "kinex/errors.hpp"
#include "kinex/kernel.hpp"
#include "kinex/dynamics.hpp"
#include "kinex/metrics.hpp"
#include "kinex/experiments.hpp"
