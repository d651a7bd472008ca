#pragma once

#include "wata/common.hpp"
#include "wata/region.hpp"
#include "wata/automaton.hpp"
#include "wata/concrete.hpp"
#include "wata/config.hpp"
#include "wata/abstraction.hpp"
#include "wata/orders.hpp"
#include "wata/acceptor.hpp"
#include "wata/compressed.hpp"
#include "wata/solver.hpp"
#include "wata/tptl.hpp"
#include "wata/counter_machine.hpp"
#include "wata/report.hpp"
