#include "freewalk/stats_mp.hpp"
#include "stats_impl.hpp"

namespace freewalk {

FREEWALK_STATS_DECLARE(, Reals50)

}  // namespace freewalk
