#pragma once

#include "bilateral_grid.hpp"
#include "color.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "disparity_prior.hpp"
#include "error.hpp"
#include "graph_cut.hpp"
#include "image.hpp"
#include "maxflow.hpp"
#include "media_io.hpp"
#include "metrics.hpp"
#include "streaming.hpp"
#include "synth.hpp"
