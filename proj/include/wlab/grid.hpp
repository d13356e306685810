#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "wlab/vec4.hpp"

namespace wlab {

// Doubly periodic immersion samples F(t_i, th_j) on the unit sphere in R^4,
// t_i = 2*pi*i/n_t, th_j = 2*pi*j/n_th, stored row-major with i (the t index)
// outer.  For rotational grids axis t is the rotation orbit and axis th runs
// along the profile.
struct TorusGrid {
  std::size_t n_t = 0, n_th = 0;
  std::string provenance;  // "product", "profile" or "external"
  std::vector<std::pair<std::string, std::string>> metadata;  // key, raw JSON
  std::vector<Vec4> points;

  Vec4& at(std::size_t i, std::size_t j) { return points[i * n_th + j]; }
  const Vec4& at(std::size_t i, std::size_t j) const {
    return points[i * n_th + j];
  }

  void set_meta(const std::string& k, double v);
  void set_meta_int(const std::string& k, long long v);
  void set_meta_str(const std::string& k, const std::string& v);

  // Unit-norm and shape validation; throws BadInput.
  void validate() const;
};

TorusGrid load_grid(const std::string& path);
void save_grid(const TorusGrid& g, const std::string& path);
std::string grid_to_json(const TorusGrid& g);
TorusGrid grid_from_json(const std::string& text, const std::string& origin);

inline constexpr long long kSchemaVersion = 1;

}  // namespace wlab
