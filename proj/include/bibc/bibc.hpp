#pragma once

// Umbrella header: simulator, detectors, metrics, and the scenario runner.

#include "bibc/config.hpp"
#include "bibc/csv.hpp"
#include "bibc/emitter.hpp"
#include "bibc/harness.hpp"
#include "bibc/linalg.hpp"
#include "bibc/metrics.hpp"
#include "bibc/parallel.hpp"
#include "bibc/reader.hpp"
#include "bibc/rng.hpp"
#include "bibc/scene.hpp"
#include "bibc/waveform.hpp"
