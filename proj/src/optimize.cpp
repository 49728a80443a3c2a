#include "shearstab/optimize.hpp"

#include "shearstab/error.hpp"

#include <algorithm>
#include <cmath>

namespace shearstab {

Minimum1d golden_section(const std::function<double(double)>& f, double lo, double hi,
                         double tol) {
  require(lo <= hi, "golden_section: empty bracket");
  require(tol > 0.0, "golden_section: tolerance must be positive");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;

  Minimum1d out;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  out.evaluations = 2;
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
    ++out.evaluations;
  }
  if (f1 <= f2) {
    out.x = x1;
    out.value = f1;
  } else {
    out.x = x2;
    out.value = f2;
  }
  return out;
}

Minimum2d nelder_mead_box(const std::function<double(std::array<double, 2>)>& f,
                          std::array<double, 2> start, double initial_step,
                          std::array<double, 2> lower, std::array<double, 2> upper, double tol,
                          int max_evaluations) {
  using Point = std::array<double, 2>;
  auto project = [&](Point p) {
    for (int d = 0; d < 2; ++d) p[d] = std::clamp(p[d], lower[d], upper[d]);
    return p;
  };

  Minimum2d out;
  struct Vertex {
    Point x;
    double value;
  };
  auto eval = [&](const Point& p) {
    ++out.evaluations;
    return Vertex{p, f(p)};
  };

  std::array<Vertex, 3> simplex{};
  simplex[0] = eval(project(start));
  for (int d = 0; d < 2; ++d) {
    Point p = start;
    p[d] += initial_step;
    if (p[d] > upper[d]) p[d] = start[d] - initial_step;
    simplex[d + 1] = eval(project(p));
  }

  auto diameter = [&] {
    double diam = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        diam = std::max(diam, std::hypot(simplex[i].x[0] - simplex[j].x[0],
                                         simplex[i].x[1] - simplex[j].x[1]));
    return diam;
  };

  while (out.evaluations < max_evaluations) {
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& l, const Vertex& r) { return l.value < r.value; });
    if (diameter() < tol) {
      out.converged = true;
      break;
    }
    const Point centroid{0.5 * (simplex[0].x[0] + simplex[1].x[0]),
                         0.5 * (simplex[0].x[1] + simplex[1].x[1])};
    auto along = [&](double t) {
      return project(Point{centroid[0] + t * (simplex[2].x[0] - centroid[0]),
                           centroid[1] + t * (simplex[2].x[1] - centroid[1])});
    };

    const Vertex reflected = eval(along(-1.0));
    if (reflected.value < simplex[0].value) {
      const Vertex expanded = eval(along(-2.0));
      simplex[2] = expanded.value < reflected.value ? expanded : reflected;
    } else if (reflected.value < simplex[1].value) {
      simplex[2] = reflected;
    } else {
      const bool outside = reflected.value < simplex[2].value;
      const Vertex contracted = eval(along(outside ? -0.5 : 0.5));
      if (contracted.value < std::min(reflected.value, simplex[2].value)) {
        simplex[2] = contracted;
      } else {
        for (int i = 1; i < 3; ++i)
          simplex[i] = eval(project(Point{0.5 * (simplex[0].x[0] + simplex[i].x[0]),
                                          0.5 * (simplex[0].x[1] + simplex[i].x[1])}));
      }
    }
  }
  std::sort(simplex.begin(), simplex.end(),
            [](const Vertex& l, const Vertex& r) { return l.value < r.value; });
  out.x = simplex[0].x;
  out.value = simplex[0].value;
  return out;
}

}  // namespace shearstab
