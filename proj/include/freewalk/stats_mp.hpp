#pragma once

#include "freewalk/multiprecision.hpp"
#include "freewalk/stats.hpp"

namespace freewalk {

FREEWALK_STATS_DECLARE(extern, Reals50)

}  // namespace freewalk
