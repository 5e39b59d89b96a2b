#pragma once

#include <string>
#include <vector>

#include "umbilic/strata.hpp"

namespace umbilic {

// Minimal static SVG figures: caustic solid, bifurcation walls thick, twist
// lines dashed, cusps and region labels marked.

struct SvgOptions {
  int size_px = 720;
  double margin = 0.06;          // fraction of the drawing size
  bool label_regions = true;
  bool draw_trajectories = false;
};

std::string svg_caustic(const CausticData& caustic, Window window, const SvgOptions& opt = {});

std::string svg_region_graph(const RegionGraph& graph, const SvgOptions& opt = {});

// Phase-portrait overlay: trajectories in the fibre plane.
std::string svg_trajectories(const std::vector<Trajectory>& trajectories, Window window,
                             const SvgOptions& opt = {});

}  // namespace umbilic
