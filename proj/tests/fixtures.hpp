#pragma once

#include "radiocast/graph.hpp"

namespace fixtures {

using radiocast::Graph;

inline Graph k2() { return Graph::from_edges(2, {{0, 1}}); }
inline Graph p3() { return Graph::from_edges(3, {{0, 1}, {1, 2}}); }
inline Graph c4() { return Graph::from_edges(4, {{0, 1}, {1, 3}, {3, 2}, {2, 0}}); }
inline Graph g6() { return Graph::from_edges(6, {{0, 1}, {0, 2}, {1, 3}, {2, 4}, {1, 5}, {2, 5}}); }

}  // namespace fixtures
