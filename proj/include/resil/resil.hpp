#pragma once

#include "resil/antifragility.hpp"
#include "resil/common.hpp"
#include "resil/dip_metrics.hpp"
#include "resil/dips.hpp"
#include "resil/fixtures.hpp"
#include "resil/ingest.hpp"
#include "resil/kernels.hpp"
#include "resil/metrics.hpp"
#include "resil/pipeline.hpp"
#include "resil/preprocess.hpp"
#include "resil/report.hpp"
#include "resil/segmentation.hpp"
#include "resil/series.hpp"
