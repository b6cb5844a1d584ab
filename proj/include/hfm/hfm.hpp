#pragma once

// Umbrella header for the HFM fairness measurement library.

#include "hfm/analysis.hpp"
#include "hfm/approx.hpp"
#include "hfm/csv.hpp"
#include "hfm/dataset.hpp"
#include "hfm/error.hpp"
#include "hfm/exact.hpp"
#include "hfm/fairness.hpp"
#include "hfm/ingest.hpp"
#include "hfm/numeric.hpp"
#include "hfm/parallel.hpp"
#include "hfm/report_json.hpp"
#include "hfm/rng.hpp"
#include "hfm/synth.hpp"
#include "hfm/version.hpp"
