#pragma once

#include "webbend/analysis.hpp"
#include "webbend/diagnostics.hpp"
#include "webbend/domain.hpp"
#include "webbend/errors.hpp"
#include "webbend/graph.hpp"
#include "webbend/grouping.hpp"
#include "webbend/ingest.hpp"
#include "webbend/metric_kind.hpp"
#include "webbend/metrics.hpp"
#include "webbend/report.hpp"
#include "webbend/synth.hpp"
