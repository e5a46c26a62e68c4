#pragma once

#include "abstraction.hpp"
#include "domains.hpp"
#include "error.hpp"
#include "harness.hpp"
#include "match_tree.hpp"
#include "metrics.hpp"
#include "mutex.hpp"
#include "pdb.hpp"
#include "psvn.hpp"
#include "reachability.hpp"
#include "search.hpp"
#include "state_table.hpp"
