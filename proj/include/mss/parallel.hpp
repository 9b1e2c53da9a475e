#ifndef MSS_PARALLEL_HPP_
#define MSS_PARALLEL_HPP_

#include <functional>

namespace mss {

/// Worker count: MSS_THREADS if set and positive, else the hardware count.
int worker_count();

/// Runs fn(i) for i in [0, n). Each index runs exactly once; callers write
/// results into per-index slots so the outcome does not depend on scheduling.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace mss

#endif  // MSS_PARALLEL_HPP_
