#pragma once

#include "vlres/baseline_b2b.hpp"
#include "vlres/bit_source.hpp"
#include "vlres/codetree.hpp"
#include "vlres/error.hpp"
#include "vlres/experiment.hpp"
#include "vlres/f2v_encoder.hpp"
#include "vlres/io.hpp"
#include "vlres/metrics.hpp"
#include "vlres/mtype.hpp"
#include "vlres/probdist.hpp"
#include "vlres/tunstall.hpp"
