#pragma once

#include <functional>

namespace tpns {

/// Runs body(i) for i in [0, n) on up to `workers` threads. Tasks are claimed in
/// index order; each must write only to its own output slot. The first exception
/// thrown is rethrown after all threads join.
void parallel_for(int n, int workers, const std::function<void(int)>& body);

} // namespace tpns
