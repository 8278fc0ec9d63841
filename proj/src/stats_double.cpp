#include "stats_impl.hpp"

namespace freewalk {

FREEWALK_STATS_DECLARE(, Reals)

}  // namespace freewalk
