#include "stats_impl.hpp"

namespace freewalk {

FREEWALK_STATS_DECLARE(, PAdicField)

}  // namespace freewalk
