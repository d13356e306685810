#include "wlab/field2d.hpp"

#include <cmath>

namespace wlab {

FieldStats field_stats(const Field2D& f) {
  FieldStats st;
  double sum = 0.0;
  for (std::size_t i = 0; i < f.n0; ++i)
    for (std::size_t j = 0; j < f.n1; ++j) {
      const double v = std::abs(f.at(i, j));
      sum += v;
      if (v > st.max_abs) {
        st.max_abs = v;
        st.arg_i = i;
        st.arg_j = j;
      }
    }
  st.mean_abs = f.size() ? sum / static_cast<double>(f.size()) : 0.0;
  return st;
}

Field2D transpose(const Field2D& f) {
  Field2D t(f.n1, f.n0);
  for (std::size_t i = 0; i < f.n0; ++i)
    for (std::size_t j = 0; j < f.n1; ++j) t.at(j, i) = f.at(i, j);
  return t;
}

}  // namespace wlab
