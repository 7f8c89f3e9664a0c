#include "hqc/ehrenfest.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hqc/errors.hpp"

namespace hqc {

namespace {

Microstate displaced(const Microstate& s, const Tangent& k, double h) {
  Microstate out = s;
  out.xi.R += h * k.dR;
  out.xi.P += h * k.dP;
  for (int i = 0; i < 3; ++i) out.n[i] += h * k.dn[i];
  out.t += h;
  return out;
}

bool finite(const Microstate& s) {
  return std::isfinite(s.xi.R) && std::isfinite(s.xi.P) && std::isfinite(s.n[0]) &&
         std::isfinite(s.n[1]) && std::isfinite(s.n[2]);
}

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

std::size_t step_count(double t_end, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("time step dt must be > 0");
  if (!(t_end >= 0.0)) throw InvalidArgument("t_end must be >= 0");
  // Tolerate t_end/dt landing a hair above an integer.
  return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
}

}  // namespace

Tangent microstate_rhs(const Microstate& s, const OperatorField& H) {
  const PauliVector h = H(s.xi);
  const PauliVector hR = H.dR(s.xi);
  const PauliVector hP = H.dP(s.xi);
  const Vec3& n = s.n;
  Tangent d;
  d.dR = hP[0] + n[0] * hP[1] + n[1] * hP[2] + n[2] * hP[3];
  d.dP = -(hR[0] + n[0] * hR[1] + n[1] * hR[2] + n[2] * hR[3]);
  d.dn = {2.0 * (h[2] * n[2] - h[3] * n[1]), 2.0 * (h[3] * n[0] - h[1] * n[2]),
          2.0 * (h[1] * n[1] - h[2] * n[0])};
  return d;
}

double hybrid_energy(const Microstate& s, const OperatorField& H) {
  const PauliVector h = H(s.xi);
  return h[0] + s.n[0] * h[1] + s.n[1] * h[2] + s.n[2] * h[3];
}

double rk4_step(Microstate& s, const OperatorField& H, double dt) {
  const Tangent k1 = microstate_rhs(s, H);
  const Tangent k2 = microstate_rhs(displaced(s, k1, 0.5 * dt), H);
  const Tangent k3 = microstate_rhs(displaced(s, k2, 0.5 * dt), H);
  const Tangent k4 = microstate_rhs(displaced(s, k3, dt), H);
  const double w = dt / 6.0;
  s.xi.R += w * (k1.dR + 2.0 * k2.dR + 2.0 * k3.dR + k4.dR);
  s.xi.P += w * (k1.dP + 2.0 * k2.dP + 2.0 * k3.dP + k4.dP);
  for (int i = 0; i < 3; ++i) s.n[i] += w * (k1.dn[i] + 2.0 * k2.dn[i] + 2.0 * k3.dn[i] + k4.dn[i]);
  s.t += dt;
  const double len = norm(s.n);
  for (double& c : s.n) c /= len;
  return std::abs(len - 1.0);
}

double advance(Microstate& s, const OperatorField& H, double t_end, double dt) {
  const double t0 = s.t;
  const std::size_t steps = step_count(t_end - t0, dt);
  double drift = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    // Times are t0 + i dt rather than a running sum, so the steps add up to
    // t_end − t0 exactly.
    const double t1 = (i + 1 == steps) ? t_end : t0 + static_cast<double>(i + 1) * dt;
    const double h = t1 - s.t;
    if (h <= 0.0) break;
    Microstate next = s;
    drift = std::max(drift, rk4_step(next, H, h));
    if (!finite(next)) {
      std::ostringstream os;
      os << "non-finite microstate at t = " << t1 << " (last good R = " << s.xi.R
         << ", P = " << s.xi.P << ")";
      throw NumericalError(os.str());
    }
    next.t = t1;
    s = next;
  }
  s.t = t_end;
  return drift;
}

Trajectory integrate_trajectory(const Microstate& s0, const OperatorField& H, double t_end,
                                double dt, const TrajectoryOptions& options) {
  const std::size_t steps = step_count(t_end, dt);
  const std::size_t stride = std::max<std::size_t>(1, options.stride);
  Trajectory tr;
  Microstate s = s0;
  s.t = 0.0;
  auto record = [&] {
    tr.samples.push_back({s.t, s.xi.R, s.xi.P, s.n, hybrid_energy(s, H)});
  };
  record();
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t1 = (i == steps) ? t_end : static_cast<double>(i) * dt;
    const double h = t1 - s.t;
    Microstate next = s;
    const double drift = rk4_step(next, H, h);
    if (!finite(next)) {
      tr.aborted = true;
      std::ostringstream os;
      os << "non-finite state at step " << i << " (t = " << s.t + h << ")";
      tr.message = os.str();
      break;
    }
    tr.max_norm_drift = std::max(tr.max_norm_drift, drift);
    next.t = t1;
    s = next;
    if (i % stride == 0 || i == steps) record();
  }
  if (!tr.aborted && steps > 0) s.t = t_end;
  tr.final_state = s;
  return tr;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,R,P,nx,ny,nz,f_H\n";
  os << std::setprecision(17);
  for (const auto& x : tr.samples) {
    os << x.t << ',' << x.R << ',' << x.P << ',' << x.n[0] << ',' << x.n[1] << ',' << x.n[2] << ','
       << x.f_H << '\n';
  }
}

}  // namespace hqc
