#pragma once

// Umbrella header for the GPU power-analysis toolkit.

#include <gpupower/core.hpp>
#include <gpupower/delimited.hpp>
#include <gpupower/gpumodel.hpp>
#include <gpupower/ingest.hpp>
#include <gpupower/jobjoin.hpp>
#include <gpupower/modal.hpp>
#include <gpupower/project.hpp>
#include <gpupower/synth.hpp>
