#pragma once

#include "germflow/analysis.hpp"
#include "germflow/cli.hpp"
#include "germflow/flow.hpp"
#include "germflow/germ.hpp"
#include "germflow/homotopy.hpp"
#include "germflow/poly.hpp"
#include "germflow/rational.hpp"
#include "germflow/report.hpp"
#include "germflow/sample_grid.hpp"
#include "germflow/zero_set.hpp"
