#pragma once

#include "topoid/error.hpp"
#include "topoid/estimation.hpp"
#include "topoid/experiments.hpp"
#include "topoid/io.hpp"
#include "topoid/matops.hpp"
#include "topoid/rate.hpp"
#include "topoid/report.hpp"
#include "topoid/system.hpp"
#include "topoid/topology.hpp"
