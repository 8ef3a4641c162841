#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lsirm/io.hpp"

namespace lsirm {

struct ScatterOptions {
  std::string title;
  double width = 640;
  double height = 640;
  bool show_bills = true;
  std::size_t dim_x = 0;
  std::size_t dim_y = 1;
};

// `groups` has one entry per row of `coords` (legislators first); bills
// with an empty group are drawn as small grey crosses.
void write_scatter_svg(std::ostream& out, const AlignedCoordinates& coords,
                       const std::vector<std::string>& groups,
                       const ScatterOptions& options = {});

// node_id,node_type,group,x,y
void write_plot_csv(std::ostream& out, const AlignedCoordinates& coords,
                    const std::vector<std::string>& groups,
                    const ScatterOptions& options = {});

}  // namespace lsirm
