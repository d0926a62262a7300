#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pmelab/field.hpp"
#include "pmelab/params.hpp"
#include "pmelab/polynomial.hpp"
#include "pmelab/quadrature.hpp"
#include "pmelab/spectrum.hpp"

namespace pme {

/// Finite-volume state of the confined porous medium equation on
/// [-box, box] (N=1) or [0, box] (radially symmetric N>=2). Uniform cells,
/// nonnegative cell averages, conservative explicit updates.
struct SimState {
  Parameters params;
  double box = 1.5;
  bool axis = true;                // N=1 signed axis, else radial
  std::vector<double> edges;       // size n+1
  std::vector<double> rho;         // size n
  double t_hat = 0.0;
  double dt = 0.0;                 // last step size
  double mass0 = 0.0;
  double clipped_mass = 0.0;       // total undershoot mass handled
  double would_be_outflow = 0.0;   // accumulated clamped boundary flux mass
  long long steps = 0;
  std::vector<double> vol;         // cached cell volumes
  std::vector<double> area;        // cached interface areas
};

class IntegrationError : public NumericalError {
 public:
  IntegrationError(const std::string& what, SimState last)
      : NumericalError(what), last_state(std::move(last)) {}
  SimState last_state;
};

namespace detail {

inline double cell_volume(const SimState& s, int i) {
  const double a = s.edges[i], b = s.edges[i + 1];
  if (s.axis) return b - a;
  const int N = s.params.dim;
  return sphere_area(N) * (std::pow(b, N) - std::pow(a, N)) / N;
}

inline double interface_area(const SimState& s, double x) {
  if (s.axis) return 1.0;
  return sphere_area(s.params.dim) * std::pow(x, s.params.dim - 1);
}

// Integral of the Barenblatt profile over [c,d] subset [0,1], with the
// r^{N-1} measure when radial; the (1-r)^{1/(m-1)} endpoint factor goes
// into a Jacobi rule when the interval touches the support edge.
inline double barenblatt_piece(const Parameters& p, double c, double d, bool radial) {
  c = std::clamp(c, 0.0, 1.0);
  d = std::clamp(d, 0.0, 1.0);
  if (!(d > c)) return 0.0;
  const double e1 = p.weight_exponent();
  const double ca = std::pow(p.profile_coefficient(), e1);
  const int N = p.dim;
  auto smooth = [&](double r) {
    const double w = ca * std::pow(1.0 + r, e1);
    return radial ? w * std::pow(r, N - 1) : w;
  };
  if (d > 1.0 - 1e-13) {
    const QuadratureRule rule = jacobi_rule_on(24, e1, 0.0, c, 1.0);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      s += rule.weights[i] * smooth(rule.nodes[i]);
    return s;
  }
  const QuadratureRule rule = mapped_rule(gauss_legendre(24), c, d);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double r = rule.nodes[i];
    s += rule.weights[i] * std::pow(1.0 - r, e1) * smooth(r);
  }
  return s;
}

// Mass of the stationary profile between signed coordinates (N=1) or radii.
inline double barenblatt_mass_between(const Parameters& p, double a, double b,
                                      bool axis) {
  if (!(b > a)) return 0.0;
  if (!axis) return sphere_area(p.dim) * barenblatt_piece(p, a, b, true);
  double total = 0.0;
  if (b > 0.0) total += barenblatt_piece(p, std::max(a, 0.0), b, false);
  if (a < 0.0) total += barenblatt_piece(p, std::max(-b, 0.0), -a, false);
  return total;
}

}  // namespace detail

/// Initial data by McCann's displacement interpolation: the stationary
/// profile pushed forward through id + s grad(psi) for the radial mode
/// (ell,k). Cell averages are exact transported masses, so the total mass
/// matches the stationary profile to quadrature precision.
/// Radial compatibility: N=1 admits ell in {0,1}; N>=2 only ell=0.
inline SimState pushforward_init(const Parameters& p, const ModeIndex& mode, double s,
                                 int cells, double box = 1.5) {
  if (cells < 8) throw std::invalid_argument("pushforward_init: cells >= 8");
  if (p.dim >= 2 && mode.ell != 0)
    throw std::invalid_argument(
        "pushforward_init: radially symmetric runs need ell=0 for N>=2");
  const Polynomial f = radial_eigenfunction(p, mode.ell, mode.k);
  const Polynomial df = f.derivative();
  const Polynomial d2f = df.derivative();

  SimState st{p};
  st.box = box;
  st.axis = (p.dim == 1);
  const int n = cells;
  st.edges.resize(n + 1);
  const double lo = st.axis ? -box : 0.0;
  for (int i = 0; i <= n; ++i)
    st.edges[i] = lo + (box - lo) * static_cast<double>(i) / n;
  st.rho.assign(n, 0.0);

  // displacement g(x) = s * d/dx psi; psi(x) = f(|x|) sign(x)^ell on the axis
  auto grad_psi = [&](double x) {
    const double r = std::abs(x);
    if (st.axis && mode.ell == 0) return (x >= 0.0 ? 1.0 : -1.0) * df(r);
    return df(r);
  };
  auto T = [&](double x) { return x + s * grad_psi(x); };

  // monotonicity of the transport map on the support
  const double xlo = st.axis ? -1.0 : 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = xlo + (1.0 - xlo) * i / 400.0;
    const double r = std::abs(x);
    const double radial_deriv = 1.0 + s * d2f(r) * (st.axis && mode.ell == 1 && x < 0.0 ? -1.0 : 1.0);
    if (!(radial_deriv > 1e-10))
      throw std::invalid_argument(
          "pushforward_init: amplitude too large, transport map not monotone");
    if (!st.axis && r > 1e-12) {
      const double tang = 1.0 + s * df(r) / r;
      if (!(tang > 1e-10))
        throw std::invalid_argument(
            "pushforward_init: amplitude too large, transport map not monotone");
    }
  }

  auto preimage = [&](double y) {
    if (y <= T(xlo)) return xlo;
    if (y >= T(1.0)) return 1.0;
    double lo_ = xlo, hi_ = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo_ + hi_);
      (T(mid) < y ? lo_ : hi_) = mid;
    }
    return 0.5 * (lo_ + hi_);
  };

  st.vol.resize(n);
  st.area.resize(n + 1);
  for (int i = 0; i < n; ++i) st.vol[i] = detail::cell_volume(st, i);
  for (int j = 0; j <= n; ++j) st.area[j] = detail::interface_area(st, st.edges[j]);

  double prev = preimage(st.edges[0]);
  for (int i = 0; i < n; ++i) {
    const double next = preimage(st.edges[i + 1]);
    const double mass = detail::barenblatt_mass_between(p, prev, next, st.axis);
    st.rho[i] = mass / st.vol[i];
    prev = next;
  }
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += st.rho[i] * st.vol[i];
  st.mass0 = total;
  return st;
}

/// Stationary-profile cell averages on the same mesh (the s=0 state).
inline SimState stationary_state(const Parameters& p, int cells, double box = 1.5) {
  return pushforward_init(p, ModeIndex{p.dim == 1 ? 1 : 0, p.dim == 1 ? 0 : 1, 1},
                          0.0, cells, box);
}

/// Cell averages of an arbitrary density profile (12-point Gauss per cell);
/// for initial data outside the displacement family, e.g. comparison runs.
inline SimState init_from_density(const Parameters& p, int cells, double box,
                                  const std::function<double(double)>& fn) {
  SimState st{p};
  st.box = box;
  st.axis = (p.dim == 1);
  const double lo = st.axis ? -box : 0.0;
  st.edges.resize(cells + 1);
  for (int i = 0; i <= cells; ++i)
    st.edges[i] = lo + (box - lo) * static_cast<double>(i) / cells;
  st.rho.assign(cells, 0.0);
  st.vol.resize(cells);
  st.area.resize(cells + 1);
  for (int i = 0; i < cells; ++i) st.vol[i] = detail::cell_volume(st, i);
  for (int j = 0; j <= cells; ++j)
    st.area[j] = detail::interface_area(st, st.edges[j]);
  const QuadratureRule ref = gauss_legendre(12);
  for (int i = 0; i < cells; ++i) {
    const QuadratureRule rule = mapped_rule(ref, st.edges[i], st.edges[i + 1]);
    double mass = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
      mass += rule.weights[q] * fn(rule.nodes[q]) *
              detail::interface_area(st, rule.nodes[q]);
    st.rho[i] = std::max(0.0, mass / st.vol[i]);
  }
  st.mass0 = 0.0;
  for (int i = 0; i < cells; ++i) st.mass0 += st.rho[i] * st.vol[i];
  return st;
}

/// One conservative explicit step. The time step obeys
/// dt <= 0.4 min( dx^2/(2 m rho_max^{m-1}), dx/max|x| ), recomputed here;
/// pass dt_cap to land exactly on an output time.
inline void step(SimState& st, double dt_cap = std::numeric_limits<double>::infinity()) {
  const int n = static_cast<int>(st.rho.size());
  const double dx = st.edges[1] - st.edges[0];
  const double m = st.params.m;
  double rho_max = 0.0;
  for (double v : st.rho) rho_max = std::max(rho_max, v);
  const double diff = 2.0 * m * std::pow(std::max(rho_max, 1e-300), m - 1.0);
  double dt = 0.4 * std::min(dx * dx / diff, dx / st.box);
  dt = std::min(dt, dt_cap);
  if (!(dt > 0.0)) throw IntegrationError("step: nonpositive dt", st);

  // minmod-limited cell slopes for the upwind drift reconstruction
  auto minmod = [](double a, double b) {
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
  };
  std::vector<double> slope(n, 0.0);  // per-cell difference units
  for (int i = 1; i + 1 < n; ++i)
    slope[i] = minmod(st.rho[i] - st.rho[i - 1], st.rho[i + 1] - st.rho[i]);

  // interface fluxes G = x rho_up + (rho_R^m - rho_L^m)/dx, with rho_up
  // reconstructed to the interface from the upwind cell. The two-point
  // pressure difference vanishes at dry interfaces and lets a wetting
  // front advance at finite speed.
  std::vector<double> rhom(n);
  for (int i = 0; i < n; ++i)
    rhom[i] = st.rho[i] > 0.0 ? std::pow(st.rho[i], m) : 0.0;
  std::vector<double> flux(n + 1, 0.0);  // area-weighted
  for (int j = 1; j < n; ++j) {
    const double x = st.edges[j];
    const double rl = st.rho[j - 1], rr = st.rho[j];
    double up = 0.0;
    if (x > 0.0) up = std::max(0.0, rr - 0.5 * slope[j]);
    else if (x < 0.0) up = std::max(0.0, rl + 0.5 * slope[j - 1]);
    const double g = x * up + (rhom[j] - rhom[j - 1]) / dx;
    flux[j] = st.area[j] * g;
  }
  // clamped boundary fluxes, monitored
  const double clamped =
      std::abs(st.edges[n]) * st.rho[n - 1] * st.area[n] +
      (st.axis ? std::abs(st.edges[0]) * st.rho[0] * st.area[0] : 0.0);
  st.would_be_outflow += clamped * dt;

  double negative = 0.0, positive = 0.0;
  const std::vector<double> before = st.rho;
  for (int i = 0; i < n; ++i) {
    st.rho[i] += dt * (flux[i + 1] - flux[i]) / st.vol[i];
    if (!std::isfinite(st.rho[i])) {
      st.rho = before;  // report the last valid state
      throw IntegrationError("step: non-finite density (blow-up)", st);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (st.rho[i] < 0.0) {
      negative += -st.rho[i] * st.vol[i];
      st.rho[i] = 0.0;
    } else {
      positive += st.rho[i] * st.vol[i];
    }
  }
  if (negative > 0.0 && positive > 0.0) {
    // redistribute the clipped mass proportionally and report it
    const double scale = (positive - negative) / positive;
    for (double& v : st.rho) v *= scale;
    st.clipped_mass += negative;
  }
  st.t_hat += dt;
  st.dt = dt;
  ++st.steps;
}

inline double total_mass(const SimState& st) {
  double s = 0.0;
  for (std::size_t i = 0; i < st.rho.size(); ++i) s += st.rho[i] * st.vol[i];
  return s;
}

namespace detail {

// Squared 2-Wasserstein distance per unit mass between two
// piecewise-constant densities given by (positions of cell edges, per-cell
// masses); the 1D optimal coupling is the monotone quantile matching. The
// per-unit-mass normalization makes a rigid translate come out at exactly
// the shift.
inline double w2_squared_cells(const std::vector<double>& edges0,
                               const std::vector<double>& mass0,
                               const std::vector<double>& edges1,
                               const std::vector<double>& mass1) {
  double M0 = 0.0, M1 = 0.0;
  for (double v : mass0) M0 += v;
  for (double v : mass1) M1 += v;
  if (!(M0 > 0.0) || std::abs(M0 - M1) > 1e-8 * std::max(M0, M1))
    throw std::domain_error("wasserstein: mass mismatch");
  const double M = std::min(M0, M1);

  // walk both quantile functions; within a cell X(q) is affine
  auto advance = [](const std::vector<double>& mass, std::size_t& i) {
    while (i < mass.size() && mass[i] <= 0.0) ++i;
  };
  std::size_t i0 = 0, i1 = 0;
  double q = 0.0, q0_lo = 0.0, q1_lo = 0.0;
  advance(mass0, i0);
  advance(mass1, i1);
  double total = 0.0;
  auto xval = [](const std::vector<double>& edges, const std::vector<double>& mass,
                 std::size_t i, double q_lo, double q) {
    const double t = (q - q_lo) / mass[i];
    return edges[i] + (edges[i + 1] - edges[i]) * t;
  };
  while (q < M * (1.0 - 1e-15) && i0 < mass0.size() && i1 < mass1.size()) {
    const double q_next = std::min({q0_lo + mass0[i0], q1_lo + mass1[i1], M});
    const double qa = q, qb = q_next;
    if (qb > qa) {
      const double da = xval(edges1, mass1, i1, q1_lo, qa) -
                        xval(edges0, mass0, i0, q0_lo, qa);
      const double db = xval(edges1, mass1, i1, q1_lo, qb) -
                        xval(edges0, mass0, i0, q0_lo, qb);
      total += (qb - qa) * (da * da + da * db + db * db) / 3.0;
    }
    q = q_next;
    if (q >= q0_lo + mass0[i0]) {
      q0_lo += mass0[i0];
      ++i0;
      advance(mass0, i0);
    }
    if (q >= q1_lo + mass1[i1]) {
      q1_lo += mass1[i1];
      ++i1;
      advance(mass1, i1);
    }
  }
  return total / M;
}

// Cells (edges + masses) from point samples interpreted piecewise-linearly,
// subdivided so the trapezoid masses are exact for the interpolant.
inline void cells_from_samples(const RadialField& f, bool radial, int dim,
                               std::vector<double>& edges, std::vector<double>& mass,
                               int split = 8) {
  edges.clear();
  mass.clear();
  const double omega = radial ? sphere_area(dim) : 1.0;
  auto weight = [&](double x) {
    return radial ? omega * std::pow(std::abs(x), dim - 1) : 1.0;
  };
  edges.push_back(f.grid.front());
  for (std::size_t i = 0; i + 1 < f.grid.size(); ++i) {
    const double a = f.grid[i], b = f.grid[i + 1];
    for (int k = 1; k <= split; ++k) {
      const double xa = a + (b - a) * (k - 1) / static_cast<double>(split);
      const double xb = a + (b - a) * k / static_cast<double>(split);
      auto lin = [&](double x) {
        const double t = (x - a) / (b - a);
        return f.values[i] * (1.0 - t) + f.values[i + 1] * t;
      };
      mass.push_back(0.5 * (lin(xa) * weight(xa) + lin(xb) * weight(xb)) * (xb - xa));
      edges.push_back(xb);
    }
  }
}

}  // namespace detail

/// 1D quadratic-Wasserstein distance between two sampled axis densities of
/// equal mass (piecewise-linear interpretation, monotone quantile coupling).
inline double wasserstein_1d(const RadialField& rho1, const RadialField& rho0) {
  if (rho1.kind != FieldKind::density || rho0.kind != FieldKind::density)
    throw std::domain_error("wasserstein_1d: density fields required");
  std::vector<double> e0, m0, e1, m1;
  detail::cells_from_samples(rho0, false, 1, e0, m0);
  detail::cells_from_samples(rho1, false, 1, e1, m1);
  return std::sqrt(detail::w2_squared_cells(e0, m0, e1, m1));
}

struct RunRecord {
  double t_hat;
  double d_l1;
  double d_wl2;
  double d_w2;
};

/// Integrate to t_max, recording distances to the stationary profile at the
/// observation cadence: L1, weighted L2 (weight rho_*^{2-m} floored at
/// `wl2_cutoff`), and the quantile Wasserstein distance (radial monotone
/// coupling for N>=2).
inline std::vector<RunRecord> run(SimState& st, double t_max, double observe_every,
                                  double wl2_cutoff = 1e-3) {
  if (!(t_max > 0.0)) throw std::invalid_argument("run: t_max > 0 required");
  if (!(observe_every > 0.0))
    throw std::invalid_argument("run: observe_every > 0 required");
  const SimState ref = stationary_state(st.params, static_cast<int>(st.rho.size()),
                                        st.box);
  const int n = static_cast<int>(st.rho.size());
  std::vector<double> vol(n), wl2(n), ref_mass(n);
  for (int i = 0; i < n; ++i) {
    vol[i] = st.vol[i];
    ref_mass[i] = ref.rho[i] * vol[i];
    const double w =
        ref.rho[i] > 0.0 ? std::pow(ref.rho[i], 2.0 - st.params.m) : 0.0;
    wl2[i] = std::max(w, wl2_cutoff);
  }

  auto observe = [&]() {
    RunRecord rec{st.t_hat, 0.0, 0.0, 0.0};
    std::vector<double> mass(n);
    for (int i = 0; i < n; ++i) {
      const double d = st.rho[i] - ref.rho[i];
      rec.d_l1 += std::abs(d) * vol[i];
      rec.d_wl2 += wl2[i] * d * d * vol[i];
      mass[i] = st.rho[i] * vol[i];
    }
    rec.d_wl2 = std::sqrt(rec.d_wl2);
    rec.d_w2 = std::sqrt(detail::w2_squared_cells(st.edges, ref_mass, st.edges, mass));
    return rec;
  };

  std::vector<RunRecord> series;
  series.push_back(observe());
  double next_obs = observe_every;
  const double t_end = st.t_hat + t_max;
  while (st.t_hat < t_end * (1.0 - 1e-14)) {
    step(st, std::min(next_obs, t_end) - st.t_hat);
    if (st.t_hat >= next_obs * (1.0 - 1e-12) || st.t_hat >= t_end * (1.0 - 1e-14)) {
      series.push_back(observe());
      if (st.t_hat >= next_obs * (1.0 - 1e-12)) next_obs += observe_every;
    }
  }
  return series;
}

/// Log-linear decay fit d(t) ~ C e^{-rate t}.
struct DecayFit {
  std::vector<double> times;
  std::vector<double> distances;
  double rate = 0.0;
  double r_squared = 0.0;
  std::pair<double, double> window{0.0, 0.0};
};

struct FitOptions {
  double skip_fraction = 0.2;  // initial transient discarded
  double floor = 0.0;          // exclude d within 10x of the drift floor
};

inline DecayFit fit_decay_rate(const std::vector<double>& t,
                               const std::vector<double>& d,
                               const FitOptions& opt = {}) {
  if (t.size() != d.size() || t.empty())
    throw std::invalid_argument("fit_decay_rate: size mismatch");
  const double t0 = t.front(), span = t.back() - t.front();
  DecayFit fit;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t0 + opt.skip_fraction * span) continue;
    if (!(d[i] > 0.0)) continue;
    if (opt.floor > 0.0 && d[i] <= 10.0 * opt.floor) continue;
    fit.times.push_back(t[i]);
    fit.distances.push_back(d[i]);
  }
  if (fit.times.size() < 5)
    throw NumericalError("fit_decay_rate: fewer than 5 usable points");
  const std::size_t n = fit.times.size();
  double st = 0.0, sy = 0.0;
  std::vector<double> logd(n);
  for (std::size_t i = 0; i < n; ++i) {
    logd[i] = std::log(fit.distances[i]);
    st += fit.times[i];
    sy += logd[i];
  }
  const double tbar = st / n, ybar = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (fit.times[i] - tbar) * (fit.times[i] - tbar);
    sxy += (fit.times[i] - tbar) * (logd[i] - ybar);
    syy += (logd[i] - ybar) * (logd[i] - ybar);
  }
  const double slope = sxy / sxx;
  fit.rate = -slope;
  if (syy > 0.0) {
    double ssres = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double pred = ybar + slope * (fit.times[i] - tbar);
      ssres += (logd[i] - pred) * (logd[i] - pred);
    }
    fit.r_squared = std::clamp(1.0 - ssres / syy, 0.0, 1.0);
  } else {
    fit.r_squared = 0.0;  // flat series: no decay signal
  }
  fit.window = {fit.times.front(), fit.times.back()};
  return fit;
}

}  // namespace pme
