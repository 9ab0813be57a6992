#ifndef KHS_SVG_HPP
#define KHS_SVG_HPP

#include <string>
#include <vector>

#include "khs/field.hpp"

namespace khs {

/// Minimal static plot emission; no external plotting dependency.
void write_heatmap_svg(const std::string& path, const ScalarField& real_field,
                       const std::string& title);
void write_trajectory_svg(const std::string& path, const std::vector<double>& xs,
                          const std::vector<double>& ys, const std::string& title,
                          double axis_range = 1.05);
void write_series_svg(const std::string& path, const std::vector<double>& ts,
                      const std::vector<double>& ys, const std::string& title);

}  // namespace khs

#endif
