#ifndef CTXLABEL_CTXLABEL_HPP
#define CTXLABEL_CTXLABEL_HPP

#include "ctxlabel/appearance.hpp"
#include "ctxlabel/context_model.hpp"
#include "ctxlabel/energy.hpp"
#include "ctxlabel/error.hpp"
#include "ctxlabel/eval.hpp"
#include "ctxlabel/experiment.hpp"
#include "ctxlabel/fuzzy_spatial.hpp"
#include "ctxlabel/geometry.hpp"
#include "ctxlabel/params.hpp"
#include "ctxlabel/pipeline.hpp"
#include "ctxlabel/raster.hpp"
#include "ctxlabel/render.hpp"
#include "ctxlabel/scene.hpp"
#include "ctxlabel/synth.hpp"

#endif
