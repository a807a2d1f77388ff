#pragma once

#include "noflip/bloch.hpp"
#include "noflip/constructions.hpp"
#include "noflip/linalg.hpp"
#include "noflip/machine.hpp"
#include "noflip/optimize.hpp"
#include "noflip/report.hpp"
#include "noflip/sampling.hpp"
#include "noflip/sweep.hpp"
#include "noflip/triple.hpp"
#include "noflip/version.hpp"
