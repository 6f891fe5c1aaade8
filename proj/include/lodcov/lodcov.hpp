#pragma once

#include "lodcov/categorize.hpp"
#include "lodcov/config.hpp"
#include "lodcov/coverage.hpp"
#include "lodcov/csv.hpp"
#include "lodcov/hyperloglog.hpp"
#include "lodcov/ingest.hpp"
#include "lodcov/kmeans.hpp"
#include "lodcov/langcodes.hpp"
#include "lodcov/line_reader.hpp"
#include "lodcov/nmi.hpp"
#include "lodcov/ntriples.hpp"
#include "lodcov/pipeline.hpp"
#include "lodcov/quantile.hpp"
#include "lodcov/remote.hpp"
