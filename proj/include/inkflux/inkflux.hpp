#pragma once

#include "inkflux/analyses.hpp"
#include "inkflux/error.hpp"
#include "inkflux/oplog.hpp"
#include "inkflux/orchestrator.hpp"
#include "inkflux/remote.hpp"
#include "inkflux/report.hpp"
#include "inkflux/sessionizer.hpp"
#include "inkflux/simulation.hpp"
#include "inkflux/stats.hpp"
#include "inkflux/synthgen.hpp"
#include "inkflux/textmetrics.hpp"
#include "inkflux/utf8.hpp"
#include "inkflux/wordgen.hpp"
