#pragma once

#include "radiocast/node_set.hpp"
#include "radiocast/graph.hpp"
#include "radiocast/decomposition.hpp"
#include "radiocast/labeling.hpp"
#include "radiocast/message.hpp"
#include "radiocast/simulator.hpp"
#include "radiocast/protocols.hpp"
#include "radiocast/verify.hpp"
#include "radiocast/io.hpp"
#include "radiocast/batch.hpp"
