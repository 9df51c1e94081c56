#include "sosbound/dynsim.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace sosbound::dynsim {

namespace {

struct Field {
  double beta, sigma, r;
  State operator()(const State& s) const {
    return State{sigma * (s[1] - s[0]), r * s[0] - s[1] - s[0] * s[2],
                 s[0] * s[1] - beta * s[2]};
  }
};

Field make_field(const LorenzParams& p) {
  if (!p.r) throw std::invalid_argument("dynsim: numeric r required");
  return Field{to_double(p.beta), to_double(p.sigma), to_double(*p.r)};
}

void check_finite(const State& s) {
  if (!std::isfinite(s[0]) || !std::isfinite(s[1]) || !std::isfinite(s[2]))
    throw IntegrationBlowup("integration blowup: non-finite state");
}

double moment_value(const MomentSpec& m, const State& s) {
  double v = 1.0;
  for (int k = 0; k < m.l; ++k) v *= s[0];
  for (int k = 0; k < m.m; ++k) v *= s[1];
  for (int k = 0; k < m.n; ++k) v *= s[2];
  return v;
}

// Kahan-compensated accumulator; 1e8 trapezoid terms must not lose the
// third digit to rounding.
struct Kahan {
  double sum = 0.0, c = 0.0;
  void add(double x) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

State flow(const Field& f, State s, double time, double dt_target) {
  long n = std::lround(std::ceil(time / dt_target));
  if (n < 1) n = 1;
  double dt = time / static_cast<double>(n);
  for (long i = 0; i < n; ++i) s = rk4_step_f(f, s, dt);
  return s;
}

}  // namespace

State rk4_step(const LorenzParams& p, const State& s, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("rk4_step: dt > 0");
  State out = rk4_step_f(make_field(p), s, dt);
  check_finite(out);
  return out;
}

AverageReport time_average(const LorenzParams& p, const std::vector<MomentSpec>& moments,
                           const TrajectoryConfig& cfg) {
  if (!(cfg.dt > 0) || !(cfg.t_transient < cfg.t_total))
    throw std::invalid_argument("time_average: bad config");
  Field f = make_field(p);
  State s = cfg.initial_state;
  long n_trans = std::lround(cfg.t_transient / cfg.dt);
  long n_avg = std::lround((cfg.t_total - cfg.t_transient) / cfg.dt);
  for (long i = 0; i < n_trans; ++i) s = rk4_step_f(f, s, cfg.dt);
  check_finite(s);

  std::vector<Kahan> acc(moments.size());
  std::vector<double> prev(moments.size());
  for (size_t k = 0; k < moments.size(); ++k) prev[k] = moment_value(moments[k], s);
  for (long i = 0; i < n_avg; ++i) {
    s = rk4_step_f(f, s, cfg.dt);
    if ((i & 0xffff) == 0) check_finite(s);
    for (size_t k = 0; k < moments.size(); ++k) {
      double cur = moment_value(moments[k], s);
      acc[k].add(0.5 * (prev[k] + cur) * cfg.dt);
      prev[k] = cur;
    }
  }
  check_finite(s);
  AverageReport rep;
  rep.horizon = n_avg * cfg.dt;
  for (size_t k = 0; k < moments.size(); ++k) {
    double mean = acc[k].sum / rep.horizon;
    rep.raw[moments[k]] = mean;
    if (moments[k].symmetric()) rep.normalized[moments[k]] = normalize(mean, moments[k], p);
  }
  return rep;
}

ObservableStats time_average_observable(const LorenzParams& p, const polyalg::DPoly& obs,
                                        const TrajectoryConfig& cfg) {
  Field f = make_field(p);
  State s = cfg.initial_state;
  long n_trans = std::lround(cfg.t_transient / cfg.dt);
  long n_avg = std::lround((cfg.t_total - cfg.t_transient) / cfg.dt);
  for (long i = 0; i < n_trans; ++i) s = rk4_step_f(f, s, cfg.dt);
  auto eval = [&](const State& st) {
    std::map<std::string, double> pt{{"x", st[0]}, {"y", st[1]}, {"z", st[2]}};
    return obs.eval(pt);
  };
  Kahan acc;
  ObservableStats st;
  double prev = eval(s);
  st.minimum = st.maximum = prev;
  for (long i = 0; i < n_avg; ++i) {
    s = rk4_step_f(f, s, cfg.dt);
    double cur = eval(s);
    acc.add(0.5 * (prev + cur) * cfg.dt);
    st.minimum = std::min(st.minimum, cur);
    st.maximum = std::max(st.maximum, cur);
    prev = cur;
  }
  st.average = acc.sum / (n_avg * cfg.dt);
  return st;
}

namespace {

struct Crossing {
  double t;
  State s;
};

// upward crossings of z = zc harvested from a chaotic run
std::vector<Crossing> harvest_crossings(const Field& f, double zc, double t_skip, double t_run,
                                        double dt) {
  State s{1.0, 1.0, 1.0};
  long nskip = std::lround(t_skip / dt);
  for (long i = 0; i < nskip; ++i) s = rk4_step_f(f, s, dt);
  std::vector<Crossing> out;
  double t = 0.0;
  State prev = s;
  long n = std::lround(t_run / dt);
  for (long i = 0; i < n; ++i) {
    State nxt = rk4_step_f(f, prev, dt);
    if (prev[2] < zc && nxt[2] >= zc) {
      double a = (zc - prev[2]) / (nxt[2] - prev[2]);
      Crossing c;
      c.t = t + a * dt;
      for (int k = 0; k < 3; ++k) c.s[k] = prev[k] + a * (nxt[k] - prev[k]);
      c.s[2] = zc;
      out.push_back(c);
    }
    prev = nxt;
    t += dt;
  }
  return out;
}

bool sign_matches(const std::string& symbols, const std::vector<Crossing>& cs, size_t start) {
  for (size_t k = 0; k < symbols.size(); ++k) {
    double x = cs[start + k].s[0];
    if (symbols[k] == '+' && x <= 0) return false;
    if (symbols[k] == '-' && x >= 0) return false;
  }
  return true;
}

}  // namespace

OrbitResult find_periodic_orbit(const LorenzParams& p, const std::string& symbols) {
  if (symbols != "+-" && symbols != "++-")
    throw std::invalid_argument("find_periodic_orbit: symbols must be \"+-\" or \"++-\"");
  Field f = make_field(p);
  double zc = to_double(*p.r) - 1.0;
  size_t nseg = symbols.size();

  auto crossings = harvest_crossings(f, zc, 50.0, 120.0, 1e-3);
  if (crossings.size() < nseg + 1) throw OrbitNotFound("no section crossings harvested");

  const double fine_dt = 1e-4;
  // unknowns: (x_i, y_i) per segment point + flight time per segment
  auto residual = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd r(3 * nseg);
    for (size_t i = 0; i < nseg; ++i) {
      State si{v(2 * i), v(2 * i + 1), zc};
      double ti = v(2 * nseg + i);
      State e = flow(f, si, ti, fine_dt);
      size_t j = (i + 1) % nseg;
      r(3 * i + 0) = e[0] - v(2 * j);
      r(3 * i + 1) = e[1] - v(2 * j + 1);
      r(3 * i + 2) = e[2] - zc;
    }
    return r;
  };

  // candidate initial guesses: crossing windows matching the symbol pattern
  // whose closure error is smallest
  std::vector<size_t> starts;
  for (size_t i = 0; i + nseg < crossings.size(); ++i) {
    if (!sign_matches(symbols, crossings, i)) continue;
    double gap = 0;
    for (int k = 0; k < 2; ++k)
      gap += std::abs(crossings[i + nseg].s[k] - crossings[i].s[k]);
    starts.push_back(i);
    (void)gap;
  }
  std::sort(starts.begin(), starts.end(), [&](size_t a, size_t b) {
    auto gap = [&](size_t i) {
      double g = 0;
      for (int k = 0; k < 2; ++k) g += std::abs(crossings[i + nseg].s[k] - crossings[i].s[k]);
      return g;
    };
    return gap(a) < gap(b);
  });
  if (starts.empty()) throw OrbitNotFound("no crossing window matches symbol sequence");

  for (size_t attempt = 0; attempt < std::min<size_t>(starts.size(), 5); ++attempt) {
    size_t s0 = starts[attempt];
    Eigen::VectorXd v(3 * nseg);
    for (size_t i = 0; i < nseg; ++i) {
      v(2 * i) = crossings[s0 + i].s[0];
      v(2 * i + 1) = crossings[s0 + i].s[1];
      v(2 * nseg + i) = crossings[s0 + i + 1].t - crossings[s0 + i].t;
    }
    bool ok = false;
    for (int it = 0; it < 30; ++it) {
      Eigen::VectorXd r = residual(v);
      double nrm = r.norm();
      if (nrm < 1e-11) {
        ok = true;
        break;
      }
      if (!std::isfinite(nrm) || nrm > 1e3) break;
      Eigen::MatrixXd J(3 * nseg, 3 * nseg);
      for (int j = 0; j < v.size(); ++j) {
        double h = 1e-7 * std::max(1.0, std::abs(v(j)));
        Eigen::VectorXd vp = v;
        vp(j) += h;
        J.col(j) = (residual(vp) - r) / h;
      }
      Eigen::VectorXd dv = J.fullPivLu().solve(-r);
      v += dv;
    }
    if (!ok) continue;

    OrbitResult orbit;
    orbit.symbols = symbols;
    Eigen::VectorXd r = residual(v);
    orbit.residual = r.norm();
    for (size_t i = 0; i < nseg; ++i) {
      orbit.section_points.push_back({v(2 * i), v(2 * i + 1), zc});
      orbit.segment_times.push_back(v(2 * nseg + i));
      orbit.period += v(2 * nseg + i);
    }
    // verify winding: sign of x at each section point
    for (size_t i = 0; i < nseg; ++i) {
      double x = orbit.section_points[i][0];
      if ((symbols[i] == '+' && x <= 0) || (symbols[i] == '-' && x >= 0))
        throw OrbitNotFound("converged orbit has wrong symbol sequence");
    }
    // sampled states for export
    State s = orbit.section_points[0];
    long nsamp = std::lround(orbit.period / 1e-3);
    double dts = orbit.period / nsamp;
    for (long i = 0; i < nsamp; ++i) {
      orbit.states.push_back(s);
      s = rk4_step_f(f, s, dts);
    }
    orbit.states.push_back(s);
    if (orbit.residual > 1e-10) continue;
    return orbit;
  }
  throw OrbitNotFound("Newton did not converge from any harvested guess");
}

AverageReport orbit_average(const LorenzParams& p, const OrbitResult& orbit,
                            const std::vector<MomentSpec>& moments) {
  if (orbit.section_points.empty()) throw std::invalid_argument("orbit_average: empty orbit");
  Field f = make_field(p);
  long n = std::lround(std::ceil(orbit.period / 1e-4));
  double dt = orbit.period / static_cast<double>(n);
  State s = orbit.section_points[0];
  std::vector<Kahan> acc(moments.size());
  std::vector<double> prev(moments.size());
  for (size_t k = 0; k < moments.size(); ++k) prev[k] = moment_value(moments[k], s);
  for (long i = 0; i < n; ++i) {
    s = rk4_step_f(f, s, dt);
    for (size_t k = 0; k < moments.size(); ++k) {
      double cur = moment_value(moments[k], s);
      acc[k].add(0.5 * (prev[k] + cur) * dt);
      prev[k] = cur;
    }
  }
  AverageReport rep;
  rep.horizon = orbit.period;
  for (size_t k = 0; k < moments.size(); ++k) {
    double mean = acc[k].sum / orbit.period;
    rep.raw[moments[k]] = mean;
    if (moments[k].symmetric()) rep.normalized[moments[k]] = normalize(mean, moments[k], p);
  }
  return rep;
}

}  // namespace sosbound::dynsim
