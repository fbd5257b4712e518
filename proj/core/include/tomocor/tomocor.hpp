#pragma once

#include "tomocor/baselines.hpp"
#include "tomocor/error.hpp"
#include "tomocor/image.hpp"
#include "tomocor/io.hpp"
#include "tomocor/metrics.hpp"
#include "tomocor/noise.hpp"
#include "tomocor/objective.hpp"
#include "tomocor/parallel.hpp"
#include "tomocor/phantoms.hpp"
#include "tomocor/pipeline.hpp"
#include "tomocor/projector.hpp"
#include "tomocor/scenario.hpp"
#include "tomocor/shift.hpp"
#include "tomocor/solver.hpp"
#include "tomocor/studies.hpp"
