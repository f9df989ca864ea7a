#pragma once

#include "bimo/capacity.hpp"
#include "bimo/channel.hpp"
#include "bimo/cli.hpp"
#include "bimo/errors.hpp"
#include "bimo/format.hpp"
#include "bimo/ldpc.hpp"
#include "bimo/metrics.hpp"
#include "bimo/montecarlo.hpp"
#include "bimo/random.hpp"
#include "bimo/special.hpp"
#include "bimo/version.hpp"
