#pragma once

#include "s4forge/cleaning.hpp"
#include "s4forge/compositor.hpp"
#include "s4forge/dataset.hpp"
#include "s4forge/error.hpp"
#include "s4forge/geometry.hpp"
#include "s4forge/hash.hpp"
#include "s4forge/pipeline.hpp"
#include "s4forge/quantize.hpp"
#include "s4forge/raster.hpp"
#include "s4forge/rng.hpp"
#include "s4forge/simplify.hpp"
#include "s4forge/snapshot.hpp"
#include "s4forge/snapshot_io.hpp"
#include "s4forge/task.hpp"
#include "s4forge/taskgen.hpp"
#include "s4forge/vocab.hpp"
