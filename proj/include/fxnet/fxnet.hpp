#pragma once

#include "fxnet/calendar.hpp"
#include "fxnet/centrality.hpp"
#include "fxnet/common.hpp"
#include "fxnet/corrnet.hpp"
#include "fxnet/io.hpp"
#include "fxnet/mstree.hpp"
#include "fxnet/panel.hpp"
#include "fxnet/parallel.hpp"
#include "fxnet/partcmp.hpp"
#include "fxnet/potts.hpp"
#include "fxnet/resolution.hpp"
#include "fxnet/sigtest.hpp"
#include "fxnet/synth.hpp"
