#pragma once

#include "darkpoint/coords.hpp"
#include "darkpoint/heatmap.hpp"

namespace darkpoint {

/// Least-squares best-fit centre of a Gaussian of scale sigma_assumed:
/// exhaustive 0.01 px grid search over a +-1.5 px window around the argmax,
/// then one 0.001 px refinement pass around the coarse winner. Deliberately
/// shares no code with the Taylor decoder; it is the independent check of
/// the refinement path.
HeatmapCoord oracle_localize(const Heatmap& h, double sigma_assumed);

}  // namespace darkpoint
