#include "wlab/two_point.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <tuple>
#include <vector>

#include "wlab/errors.hpp"
#include "wlab/kernels.hpp"
#include "wlab/parallel.hpp"
#include "wlab/vec4.hpp"

namespace wlab {

namespace {

constexpr std::size_t kMaxChunks = 64;   // parallel_chunks never exceeds this
constexpr std::size_t kMaxCells = 4096;  // candidate cap before brute fallback
constexpr std::size_t kTopCells = 10;

struct PairBest {
  double v = std::numeric_limits<double>::infinity();
  std::size_t x = 0, y = 0;

  void consider(double val, std::size_t xf, std::size_t yf) {
    if (val < v || (val == v && (xf < x || (xf == x && yf < y)))) {
      v = val;
      x = xf;
      y = yf;
    }
  }
  void merge(const PairBest& o) { consider(o.v, o.x, o.y); }
};

struct Soa {
  std::vector<double> c0, c1, c2, c3;

  void resize(std::size_t n) {
    c0.resize(n);
    c1.resize(n);
    c2.resize(n);
    c3.resize(n);
  }
  void set(std::size_t p, const Vec4& a) {
    c0[p] = a[0];
    c1[p] = a[1];
    c2[p] = a[2];
    c3[p] = a[3];
  }
};

struct ScanCtx {
  const TorusGrid* grid = nullptr;
  const CurvatureField* cf = nullptr;
  double alpha = 1.0;
  bool exclude_diag = false;
  std::size_t nt = 0, nth = 0, n = 0;
  std::vector<double> phi;
  Soa yfull;
};

ScanCtx make_ctx(const TorusGrid& grid, const CurvatureField& cf, double alpha,
                 bool exclude_diag) {
  if (grid.n_t != cf.n_t || grid.n_th != cf.n_th)
    raise(ErrorCode::BadInput, "grid and curvature field shapes differ");
  if (!(alpha >= 1.0) || !std::isfinite(alpha))
    raise(ErrorCode::BadInput, "two-point parameter alpha must be >= 1");
  ScanCtx c;
  c.grid = &grid;
  c.cf = &cf;
  c.alpha = alpha;
  c.exclude_diag = exclude_diag;
  c.nt = grid.n_t;
  c.nth = grid.n_th;
  c.n = c.nt * c.nth;
  c.phi.resize(c.n);
  c.yfull.resize(c.n);
  for (std::size_t p = 0; p < c.n; ++p) {
    c.phi[p] = alpha * cf.lam1.a[p] - (alpha - 1.0) * cf.lam2.a[p];
    c.yfull.set(p, grid.points[p]);
  }
  return c;
}

double diag_value(const ScanCtx& c) {
  return c.exclude_diag ? std::numeric_limits<double>::infinity() : 0.0;
}

// Z(x, y) for all y, diagonal entry pinned afterwards.
void full_row(const ScanCtx& c, std::size_t x, double* z) {
  const Vec4& fx = c.grid->points[x];
  const Vec4& nx = c.cf->nu[x];
  kernels::pair_row(c.phi[x], fx.v.data(), nx.v.data(), c.yfull.c0.data(),
                    c.yfull.c1.data(), c.yfull.c2.data(), c.yfull.c3.data(), z,
                    c.n);
  z[x] = diag_value(c);
}

PairBest brute_min(const ScanCtx& c, std::size_t& evals) {
  std::vector<PairBest> part(kMaxChunks);
  parallel_chunks(c.n, [&](std::size_t ci, std::size_t b, std::size_t e) {
    std::vector<double> z(c.n);
    PairBest best;
    for (std::size_t x = b; x < e; ++x) {
      full_row(c, x, z.data());
      for (std::size_t y = 0; y < c.n; ++y) best.consider(z[y], x, y);
    }
    part[ci] = best;
  });
  PairBest best;
  for (const auto& p : part) best.merge(p);
  evals += c.n * c.n;
  return best;
}

// Coarse lattice of every k-th index in both directions, row-major.
struct CoarseSet {
  std::size_t mt = 0, mth = 0;
  std::vector<std::size_t> idx;  // flat grid index per lattice point
  Soa soa;
};

CoarseSet make_coarse(const ScanCtx& c, std::size_t k) {
  CoarseSet s;
  s.mt = (c.nt + k - 1) / k;
  s.mth = (c.nth + k - 1) / k;
  s.idx.reserve(s.mt * s.mth);
  for (std::size_t a = 0; a < s.mt; ++a)
    for (std::size_t b = 0; b < s.mth; ++b) s.idx.push_back(a * k * c.nth + b * k);
  s.soa.resize(s.idx.size());
  for (std::size_t p = 0; p < s.idx.size(); ++p)
    s.soa.set(p, c.grid->points[s.idx[p]]);
  return s;
}

void coarse_row(const ScanCtx& c, const CoarseSet& cs, std::size_t xpos,
                double* z) {
  std::size_t x = cs.idx[xpos];
  const Vec4& fx = c.grid->points[x];
  const Vec4& nx = c.cf->nu[x];
  kernels::pair_row(c.phi[x], fx.v.data(), nx.v.data(), cs.soa.c0.data(),
                    cs.soa.c1.data(), cs.soa.c2.data(), cs.soa.c3.data(), z,
                    cs.idx.size());
  z[xpos] = diag_value(c);
}

struct TopCells {
  std::vector<std::tuple<double, std::size_t, std::size_t>> e;  // (v, xpos, ypos)

  void push(double v, std::size_t x, std::size_t y) {
    e.emplace_back(v, x, y);
    std::push_heap(e.begin(), e.end());
    if (e.size() > kTopCells) {
      std::pop_heap(e.begin(), e.end());
      e.pop_back();
    }
  }
};

// One refinement window: the coarse cell at lattice (a, b) plus a one-cell
// halo on each side, clipped to at most the full axis.
struct Window {
  std::size_t start_t = 0, start_th = 0, len_t = 0, len_th = 0;
};

Window cell_window(const ScanCtx& c, std::size_t k, std::size_t a,
                   std::size_t b) {
  Window w;
  w.len_t = std::min(3 * k, c.nt);
  w.len_th = std::min(3 * k, c.nth);
  w.start_t = (a * k + c.nt - std::min(k, c.nt)) % c.nt;
  w.start_th = (b * k + c.nth - std::min(k, c.nth)) % c.nth;
  return w;
}

PairBest engine_min(const ScanCtx& c, std::size_t coarse, std::size_t& evals,
                    std::size_t& refine_cells, bool& used_brute) {
  used_brute = false;
  refine_cells = 0;
  std::size_t k = std::max<std::size_t>(coarse, 1);
  CoarseSet cs = (k > 1) ? make_coarse(c, k) : CoarseSet{};
  std::size_t nc = cs.idx.size();
  // The coarse stage only pays off when it is clearly cheaper than brute.
  if (k <= 1 || nc * nc * 4 >= c.n * c.n) {
    used_brute = true;
    return brute_min(c, evals);
  }

  std::vector<PairBest> part(kMaxChunks);
  std::vector<TopCells> tops(kMaxChunks);
  parallel_chunks(nc, [&](std::size_t ci, std::size_t b, std::size_t e) {
    std::vector<double> z(nc);
    PairBest best;
    TopCells top;
    for (std::size_t xp = b; xp < e; ++xp) {
      coarse_row(c, cs, xp, z.data());
      for (std::size_t yp = 0; yp < nc; ++yp) {
        best.consider(z[yp], cs.idx[xp], cs.idx[yp]);
        top.push(z[yp], xp, yp);
      }
    }
    part[ci] = best;
    tops[ci] = top;
  });
  evals += nc * nc;
  PairBest coarse_best;
  for (const auto& p : part) coarse_best.merge(p);

  std::vector<std::tuple<double, std::size_t, std::size_t>> pool;
  for (const auto& t : tops) pool.insert(pool.end(), t.e.begin(), t.e.end());
  std::sort(pool.begin(), pool.end());
  double tenth = std::get<0>(pool[std::min(pool.size(), kTopCells) - 1]);
  double zscale = 0.0;
  for (std::size_t p = 0; p < c.n; ++p)
    zscale = std::max(zscale, std::abs(c.phi[p]));
  double slack = 1e-12 * (2.0 * zscale + 1.0);
  double thresh = std::max(tenth, coarse_best.v + slack);

  // Second sweep collects every coarse pair at or below the threshold, so
  // tie plateaus widen the candidate set instead of being cut at ten.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> cparts(
      kMaxChunks);
  parallel_chunks(nc, [&](std::size_t ci, std::size_t b, std::size_t e) {
    std::vector<double> z(nc);
    auto& out = cparts[ci];
    for (std::size_t xp = b; xp < e; ++xp) {
      coarse_row(c, cs, xp, z.data());
      for (std::size_t yp = 0; yp < nc; ++yp)
        if (z[yp] <= thresh) out.emplace_back(xp, yp);
    }
  });
  evals += nc * nc;
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (const auto& p : cparts) cells.insert(cells.end(), p.begin(), p.end());

  std::size_t wlen = std::min(3 * k, c.nt) * std::min(3 * k, c.nth);
  if (cells.size() > kMaxCells || cells.size() * wlen * wlen >= c.n * c.n) {
    used_brute = true;
    return brute_min(c, evals);
  }

  refine_cells = cells.size();
  std::vector<PairBest> rpart(kMaxChunks);
  parallel_chunks(cells.size(), [&](std::size_t ci, std::size_t b,
                                    std::size_t e) {
    PairBest best;
    Soa ysoa;
    std::vector<std::size_t> yidx;
    std::vector<double> z;
    for (std::size_t cell = b; cell < e; ++cell) {
      auto [xp, yp] = cells[cell];
      Window wx = cell_window(c, k, xp / cs.mth, xp % cs.mth);
      Window wy = cell_window(c, k, yp / cs.mth, yp % cs.mth);
      std::size_t my = wy.len_t * wy.len_th;
      ysoa.resize(my);
      yidx.resize(my);
      z.resize(my);
      for (std::size_t i = 0; i < wy.len_t; ++i)
        for (std::size_t j = 0; j < wy.len_th; ++j) {
          std::size_t f = ((wy.start_t + i) % c.nt) * c.nth +
                          (wy.start_th + j) % c.nth;
          yidx[i * wy.len_th + j] = f;
          ysoa.set(i * wy.len_th + j, c.grid->points[f]);
        }
      for (std::size_t i = 0; i < wx.len_t; ++i)
        for (std::size_t j = 0; j < wx.len_th; ++j) {
          std::size_t x = ((wx.start_t + i) % c.nt) * c.nth +
                          (wx.start_th + j) % c.nth;
          const Vec4& fx = c.grid->points[x];
          const Vec4& nx = c.cf->nu[x];
          kernels::pair_row(c.phi[x], fx.v.data(), nx.v.data(),
                            ysoa.c0.data(), ysoa.c1.data(), ysoa.c2.data(),
                            ysoa.c3.data(), z.data(), my);
          for (std::size_t q = 0; q < my; ++q) {
            if (yidx[q] == x) z[q] = diag_value(c);
            best.consider(z[q], x, yidx[q]);
          }
        }
    }
    rpart[ci] = best;
  });
  evals += cells.size() * wlen * wlen;
  PairBest best = coarse_best;
  for (const auto& p : rpart) best.merge(p);
  return best;
}

double polish_min(const TorusGrid& grid, const CurvatureField& cf,
                  double alpha, const PairBest& best, std::size_t& evals) {
  std::size_t nt = grid.n_t, nth = grid.n_th;
  std::size_t id[4] = {best.x / nth, best.x % nth, best.y / nth,
                       best.y % nth};
  const std::size_t dim[4] = {nt, nth, nt, nth};
  double total = best.v;
  for (int a = 0; a < 4; ++a) {
    std::size_t save = id[a];
    auto flat_pair = [&](std::size_t* q, std::size_t& x, std::size_t& y) {
      x = q[0] * nth + q[1];
      y = q[2] * nth + q[3];
    };
    std::size_t xp, yp;
    id[a] = (save + 1) % dim[a];
    flat_pair(id, xp, yp);
    double vp = z_pair(grid, cf, alpha, xp, yp);
    id[a] = (save + dim[a] - 1) % dim[a];
    flat_pair(id, xp, yp);
    double vm = z_pair(grid, cf, alpha, xp, yp);
    id[a] = save;
    evals += 2;
    double g = 0.5 * (vp - vm);
    double h = vp + vm - 2.0 * best.v;
    if (h <= 0.0) continue;  // flat or tied direction, no parabola to fit
    double d = std::clamp(-g / h, -1.0, 1.0);
    total += g * d + 0.5 * h * d * d;
  }
  return total;
}

}  // namespace

double z_pair(const TorusGrid& grid, const CurvatureField& cf, double alpha,
              std::size_t x, std::size_t y) {
  if (x == y) return 0.0;
  const Vec4& fx = grid.points[x];
  const Vec4& fy = grid.points[y];
  const Vec4& nx = cf.nu[x];
  double phi = alpha * cf.lam1.a[x] - (alpha - 1.0) * cf.lam2.a[x];
  double df = fx[0] * fy[0];
  df += fx[1] * fy[1];
  df += fx[2] * fy[2];
  df += fx[3] * fy[3];
  double dn = nx[0] * fy[0];
  dn += nx[1] * fy[1];
  dn += nx[2] * fy[2];
  dn += nx[3] * fy[3];
  return phi * (1.0 - df) - dn;
}

TwoPointScan scan_Z(const TorusGrid& grid, const CurvatureField& cf,
                    double alpha, std::size_t coarse) {
  ScanCtx c = make_ctx(grid, cf, alpha, false);
  TwoPointScan s;
  s.alpha = alpha;
  s.coarse_factor = std::max<std::size_t>(coarse, 1);
  std::size_t evals = 0;
  PairBest best = engine_min(c, s.coarse_factor, evals, s.refine_cells,
                             s.used_brute);
  s.min_value = best.v;
  s.xi = best.x / c.nth;
  s.xj = best.x % c.nth;
  s.yi = best.y / c.nth;
  s.yj = best.y % c.nth;
  s.polished_min = polish_min(grid, cf, alpha, best, evals);
  s.evaluations = evals;
  return s;
}

double kappa_star(const TorusGrid& grid, const CurvatureField& cf,
                  double tol) {
  if (!(tol >= 0.0))
    raise(ErrorCode::BadInput, "kappa_star tolerance must be nonnegative");
  ScanCtx c = make_ctx(grid, cf, 1.0, false);
  double scale = 1.0;
  for (std::size_t p = 0; p < c.n; ++p)
    scale = std::max({scale, std::abs(cf.lam1.a[p]), std::abs(cf.lam2.a[p])});
  const double a_cap = 1e6 * scale;

  // Z_a - Z_1 = (a - 1) (lambda1 - lambda2)(x) (1 - <F(x),F(y)>) >= 0
  // pairwise, so only the alpha = 1 violations can stay below -tol; collect
  // them once with their growth coefficients and bisect on the collection.
  struct Viol {
    double z1, cp;
  };
  constexpr std::size_t kChunkCap = std::size_t(1) << 22;
  std::vector<std::vector<Viol>> parts(kMaxChunks);
  std::vector<char> overflow(kMaxChunks, 0);
  parallel_chunks(c.n, [&](std::size_t ci, std::size_t b, std::size_t e) {
    std::vector<double> z(c.n);
    auto& out = parts[ci];
    for (std::size_t x = b; x < e && !overflow[ci]; ++x) {
      full_row(c, x, z.data());
      const Vec4& fx = c.grid->points[x];
      double spread = cf.lam1.a[x] - cf.lam2.a[x];
      for (std::size_t y = 0; y < c.n; ++y) {
        if (z[y] < -tol) {
          if (out.size() >= kChunkCap) {
            overflow[ci] = 1;
            break;
          }
          out.push_back({z[y], spread * (1.0 - dot(fx, c.grid->points[y]))});
        }
      }
    }
  });

  bool overflowed = false;
  std::size_t total = 0;
  for (std::size_t ci = 0; ci < kMaxChunks; ++ci) {
    overflowed = overflowed || overflow[ci] != 0;
    total += parts[ci].size();
  }
  if (overflowed) {
    // Degenerate landscape with a huge violation set: fall back to a full
    // minimum sweep per bisection step instead of storing the pairs.
    parts.clear();
    std::size_t evals = 0;
    auto min_at = [&](double a) {
      ScanCtx ca = make_ctx(grid, cf, a, false);
      return brute_min(ca, evals).v;
    };
    if (min_at(a_cap) < -tol)
      raise(ErrorCode::NotNonnegativeAtMax,
            "two-point function stays negative at the alpha cap");
    double lo = 1.0, hi = a_cap;
    if (min_at(lo) >= -tol) return lo;
    while (hi - lo > 1e-3) {
      double mid = 0.5 * (lo + hi);
      (min_at(mid) >= -tol ? hi : lo) = mid;
    }
    return hi;
  }

  if (total == 0) return 1.0;
  std::vector<Viol> viols;
  viols.reserve(total);
  for (const auto& p : parts) viols.insert(viols.end(), p.begin(), p.end());

  double a_need = 1.0;
  for (const auto& v : viols) {
    if (v.cp <= 0.0)
      raise(ErrorCode::NotNonnegativeAtMax,
            "violating pair does not improve with alpha");
    a_need = std::max(a_need, 1.0 + (-v.z1 - tol) / v.cp);
  }
  if (!(a_need <= a_cap))
    raise(ErrorCode::NotNonnegativeAtMax,
          "required alpha exceeds the curvature-scale cap");

  auto ok = [&](double a) {
    for (const auto& v : viols)
      if (v.z1 + (a - 1.0) * v.cp < -tol) return false;
    return true;
  };
  double lo = 1.0, hi = a_need;
  if (ok(lo)) return lo;  // every violation is within tol of the boundary
  while (hi - lo > 1e-3) {
    double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

ReflectionCheck reflection_check(const TorusGrid& grid,
                                 const CurvatureField& cf,
                                 const TwoPointScan& scan, double touch_tol) {
  if (scan.alpha != 1.0)
    raise(ErrorCode::BadInput, "reflection check requires an alpha = 1 scan");
  std::size_t nth = grid.n_th;
  std::size_t x = scan.xi * nth + scan.xj;
  std::size_t y = scan.yi * nth + scan.yj;
  if (x == y) {
    // The scan bottomed out on the diagonal; look for the best genuinely
    // distinct pair with an exhaustive diagonal-free sweep.
    ScanCtx c = make_ctx(grid, cf, 1.0, true);
    std::size_t evals = 0;
    PairBest best = brute_min(c, evals);
    if (!(best.v <= touch_tol))
      raise(ErrorCode::NoTouchingPair,
            "only diagonal pairs reach the touch tolerance");
    x = best.x;
    y = best.y;
  } else if (!(scan.min_value <= touch_tol)) {
    raise(ErrorCode::NoTouchingPair, "no pair reaches the touch tolerance");
  }

  Vec4 u = grid.points[x] - grid.points[y];
  double un = norm(u);
  if (un < 1e-12)
    raise(ErrorCode::NoTouchingPair,
          "touching pair collapses to a single point");
  Vec4 uh = u * (1.0 / un);
  auto tau = [&](const Vec4& p) { return p - uh * (2.0 * dot(p, uh)); };

  ReflectionCheck rc;
  rc.xi = x / nth;
  rc.xj = x % nth;
  rc.yi = y / nth;
  rc.yj = y % nth;
  for (int i = 0; i < 4; ++i) rc.axis[i] = uh[i];
  rc.residual_position = norm(grid.points[y] - tau(grid.points[x]));
  rc.residual_normal = norm(cf.nu[y] - tau(cf.nu[x]));
  rc.valid = true;
  return rc;
}

ResidualSummary inscribed_radius_summary(const TwoPointScan& s,
                                         std::size_t n_th) {
  ResidualSummary r;
  r.name = "inscribed_radius";
  r.max_abs = -s.min_value;  // signed: negative when Z stays positive
  r.mean_abs = 0.0;
  r.arg_i = s.xi * n_th + s.xj;
  r.arg_j = s.yi * n_th + s.yj;
  r.tolerance = 1e-6;
  r.pass = r.max_abs <= r.tolerance;
  return r;
}

ResidualSummary inscribed_radius_report(const TorusGrid& grid,
                                        const CurvatureField& cf) {
  return inscribed_radius_summary(scan_Z(grid, cf, 1.0), grid.n_th);
}

}  // namespace wlab
