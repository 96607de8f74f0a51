#include "beamspin/bloch.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace beamspin {

namespace {

using Mat3 = std::array<double, 9>;

Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      const double aik = a[3 * i + k];
      for (int j = 0; j < 3; ++j) c[3 * i + j] += aik * b[3 * k + j];
    }
  return c;
}

double inf_norm(const Mat3& a) {
  double best = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double r = std::fabs(a[3 * i]) + std::fabs(a[3 * i + 1]) + std::fabs(a[3 * i + 2]);
    best = std::max(best, r);
  }
  return best;
}

// exp(A) by scaling-and-squaring with a Taylor kernel; for the 3x3
// dissipative Bloch generator this is accurate to ~1e-14.
Mat3 expm(Mat3 a) {
  int squarings = 0;
  double norm = inf_norm(a);
  while (norm > 0.5) {
    norm *= 0.5;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);
  for (double& v : a) v *= scale;

  Mat3 result{1, 0, 0, 0, 1, 0, 0, 0, 1};
  Mat3 term{1, 0, 0, 0, 1, 0, 0, 0, 1};
  for (int k = 1; k <= 17; ++k) {
    term = matmul(term, a);
    const double inv = 1.0 / k;
    for (double& v : term) v *= inv;
    for (int i = 0; i < 9; ++i) result[i] += term[i];
  }
  for (int s = 0; s < squarings; ++s) result = matmul(result, result);
  return result;
}

BlochState apply(const Mat3& m, const BlochState& v) {
  return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
          m[3] * v.x + m[4] * v.y + m[5] * v.z,
          m[6] * v.x + m[7] * v.y + m[8] * v.z};
}

Mat3 bloch_generator(const SpinParams& spin, const DriveParams& drive) {
  const double g1 = 2.0 * spin.gamma1;
  const double g2 = spin.gamma1 + spin.gamma2;
  return {-g2, -drive.delta, 0.0,
          drive.delta, -g2, -drive.omega_rabi,
          0.0, drive.omega_rabi, -g1};
}

} // namespace

double longitudinal_rate(const SpinParams& spin) { return 2.0 * spin.gamma1; }
double transverse_rate(const SpinParams& spin) { return spin.gamma1 + spin.gamma2; }

Trajectory evolve(const SpinParams& spin, const DriveParams& drive,
                  const BlochState& initial, std::span<const double> times) {
  validate(spin);
  if (!std::isfinite(drive.omega_rabi) || !std::isfinite(drive.delta) ||
      drive.omega_rabi < 0.0)
    throw std::domain_error("evolve: bad drive parameters");
  if (times.empty()) throw std::invalid_argument("evolve: empty time grid");
  if (!(times[0] >= 0.0)) throw std::invalid_argument("evolve: times must start at >= 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("evolve: time grid must be strictly increasing");
  if (initial.norm2() > 1.0 + 2e-9)
    throw std::invalid_argument("evolve: initial state outside the Bloch ball");

  const Mat3 gen = bloch_generator(spin, drive);

  Trajectory traj;
  traj.times.assign(times.begin(), times.end());
  traj.states.reserve(times.size());

  // Repeated step sizes reuse the propagator (uniform grids hit this).
  double cached_dt = -1.0;
  Mat3 cached_prop{};
  BlochState v = initial;
  double t_prev = 0.0;
  for (const double t : times) {
    const double dt = t - t_prev;
    if (dt > 0.0) {
      if (dt != cached_dt) {
        Mat3 a = gen;
        for (double& x : a) x *= dt;
        cached_prop = expm(a);
        cached_dt = dt;
      }
      v = apply(cached_prop, v);
    }
    t_prev = t;
    traj.states.push_back(v);
  }
  return traj;
}

} // namespace beamspin
