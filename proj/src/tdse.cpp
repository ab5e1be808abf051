#include "wpflux/tdse.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <sstream>

#include "wpflux/errors.hpp"

namespace wpflux {

using cplx = std::complex<double>;

void GridSpec::validate() const {
  if (!(x_max > x_min)) throw ConfigurationError("grid requires x_max > x_min");
  if (n < 256 || (n & (n - 1)) != 0) {
    throw ConfigurationError("grid size n must be a power of two >= 256");
  }
  if (!(dt > 0.0)) throw ConfigurationError("grid time step dt must be > 0");
}

double GridSpec::k(std::size_t j) const {
  const double dk = 2.0 * std::numbers::pi / length();
  const auto jj = static_cast<double>(j);
  return j < n / 2 ? dk * jj : dk * (jj - static_cast<double>(n));
}

double WaveState::norm() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return s * grid.dx();
}

WaveState init_gaussian(const GridSpec& grid, const PacketSpec& packet) {
  grid.validate();
  packet.validate();
  if (grid.x_min > -8.0 * packet.sigma || grid.x_max < 8.0 * packet.sigma) {
    std::ostringstream msg;
    msg << "grid [" << grid.x_min << ", " << grid.x_max << "] is narrower than +-8 sigma = "
        << 8.0 * packet.sigma;
    throw ConfigurationError(msg.str());
  }
  WaveState state{grid, std::vector<cplx>(grid.n), 0.0};
  const double amp = 1.0 / std::sqrt(packet.sigma * std::sqrt(std::numbers::pi));
  const double inv2s2 = 1.0 / (2.0 * packet.sigma * packet.sigma);
  for (std::size_t j = 0; j < grid.n; ++j) {
    const double x = grid.x(j);
    state.values[j] = amp * std::exp(-x * x * inv2s2);
  }
  return state;
}

std::complex<double> free_gaussian(double x, double t, double sigma) {
  const cplx spread(1.0, t / (sigma * sigma));
  const double amp = 1.0 / std::sqrt(sigma * std::sqrt(std::numbers::pi));
  return amp / std::sqrt(spread) * std::exp(-x * x / (2.0 * sigma * sigma * spread));
}

namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr std::size_t kPhaseBlock = 64;

}  // namespace

struct Propagator::Impl {
  GridSpec grid;
  fftw_complex* buffer = nullptr;
  fftw_complex* aux = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  fftw_plan aux_forward = nullptr;
  fftw_plan aux_backward = nullptr;
  std::vector<double> k;
  std::vector<cplx> kinetic;  // exp(-i k^2 h / 2) / n
  double kinetic_h = -1.0;
  double boundary_tolerance = 1e-12;

  explicit Impl(const GridSpec& g) : grid(g) {
    grid.validate();
    const int n = static_cast<int>(grid.n);
    std::lock_guard lock(planner_mutex());
    buffer = fftw_alloc_complex(grid.n);
    aux = fftw_alloc_complex(grid.n);
    forward = fftw_plan_dft_1d(n, buffer, buffer, FFTW_FORWARD, FFTW_MEASURE);
    backward = fftw_plan_dft_1d(n, buffer, buffer, FFTW_BACKWARD, FFTW_MEASURE);
    aux_forward = fftw_plan_dft_1d(n, aux, aux, FFTW_FORWARD, FFTW_MEASURE);
    aux_backward = fftw_plan_dft_1d(n, aux, aux, FFTW_BACKWARD, FFTW_MEASURE);
    k.resize(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) k[j] = grid.k(j);
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_destroy_plan(aux_forward);
    fftw_destroy_plan(aux_backward);
    fftw_free(buffer);
    fftw_free(aux);
  }

  cplx* data() { return reinterpret_cast<cplx*>(buffer); }
  cplx* aux_data() { return reinterpret_cast<cplx*>(aux); }

  void load(const WaveState& state) {
    if (state.values.size() != grid.n) throw UsageError("wave state does not match the grid");
    std::memcpy(buffer, state.values.data(), grid.n * sizeof(cplx));
  }
  void store(WaveState& state) const {
    const cplx* src = reinterpret_cast<const cplx*>(buffer);
    std::copy(src, src + grid.n, state.values.begin());
  }

  void ensure_kinetic(double h) {
    if (h == kinetic_h) return;
    kinetic.resize(grid.n);
    const double inv_n = 1.0 / static_cast<double>(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) kinetic[j] = std::polar(inv_n, -0.5 * k[j] * k[j] * h);
    kinetic_h = h;
  }

  // psi_j *= exp(i a x_j); the phase is advanced by recurrence inside short
  // blocks and recomputed exactly at each block start.
  void apply_potential(double a) {
    if (a == 0.0) return;
    cplx* psi = data();
    const double dx = grid.dx();
    const cplx w = std::polar(1.0, a * dx);
    for (std::size_t start = 0; start < grid.n; start += kPhaseBlock) {
      cplx p = std::polar(1.0, a * grid.x(start));
      const std::size_t end = std::min(grid.n, start + kPhaseBlock);
      for (std::size_t j = start; j < end; ++j) {
        psi[j] *= p;
        p *= w;
      }
    }
  }

  void apply_kinetic(double h) {
    ensure_kinetic(h);
    fftw_execute(forward);
    cplx* psi = data();
    for (std::size_t j = 0; j < grid.n; ++j) psi[j] *= kinetic[j];
    fftw_execute(backward);
  }

  // aux <- d psi / dx for the state currently held in buffer
  void derivative_into_aux() {
    std::memcpy(aux, buffer, grid.n * sizeof(cplx));
    fftw_execute(aux_forward);
    cplx* d = aux_data();
    const double inv_n = 1.0 / static_cast<double>(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) {
      d[j] *= (j == grid.n / 2) ? cplx(0.0, 0.0) : cplx(0.0, k[j] * inv_n);
    }
    fftw_execute(aux_backward);
  }

  double boundary_amplitude() const {
    const auto* psi = reinterpret_cast<const cplx*>(buffer);
    const std::size_t edge = std::max<std::size_t>(4, grid.n / 50);
    double worst = 0.0;
    for (std::size_t j = 0; j < edge; ++j) {
      worst = std::max(worst, std::abs(psi[j]));
      worst = std::max(worst, std::abs(psi[grid.n - 1 - j]));
    }
    return worst;
  }
};

Propagator::Propagator(const GridSpec& grid) : impl_(std::make_unique<Impl>(grid)) {}
Propagator::~Propagator() = default;
Propagator::Propagator(Propagator&&) noexcept = default;
Propagator& Propagator::operator=(Propagator&&) noexcept = default;

const GridSpec& Propagator::grid() const { return impl_->grid; }

void Propagator::set_boundary_tolerance(double tol) { impl_->boundary_tolerance = tol; }

void Propagator::step(WaveState& state, const FieldFn& field, double dt) {
  if (!(dt > 0.0)) throw UsageError("time step must be > 0");
  impl_->load(state);
  const double a = field(state.t + 0.5 * dt) * 0.5 * dt;
  impl_->apply_potential(a);
  impl_->apply_kinetic(dt);
  impl_->apply_potential(a);
  impl_->store(state);
  state.t += dt;
}

void Propagator::evolve_to(WaveState& state, const FieldFn& field, double t_target) {
  const double span = t_target - state.t;
  if (span < 0.0) throw UsageError("evolve_to cannot run backwards in time");
  if (span == 0.0) return;
  const auto steps =
      static_cast<std::size_t>(std::max(1.0, std::ceil(span / impl_->grid.dt - 1e-9)));
  const double h = span / static_cast<double>(steps);
  const double t0 = state.t;

  impl_->load(state);
  double half = field(t0 + 0.5 * h) * 0.5 * h;
  impl_->apply_potential(half);
  for (std::size_t s = 0; s < steps; ++s) {
    impl_->apply_kinetic(h);
    double a = half;
    if (s + 1 < steps) {
      half = field(t0 + (static_cast<double>(s + 1) + 0.5) * h) * 0.5 * h;
      a += half;
    }
    impl_->apply_potential(a);
  }
  impl_->store(state);
  state.t = t_target;

  if (impl_->boundary_tolerance > 0.0) {
    const double leak = impl_->boundary_amplitude();
    if (leak > impl_->boundary_tolerance) {
      std::ostringstream msg;
      msg << "wave packet reached the grid boundary at t = " << t_target << " (|psi| = " << leak
          << " > " << impl_->boundary_tolerance << "); widen [" << impl_->grid.x_min << ", "
          << impl_->grid.x_max << "]";
      throw NumericalError(msg.str());
    }
  }
}

std::vector<double> Propagator::flux_field(const WaveState& state) {
  impl_->load(state);
  impl_->derivative_into_aux();
  const cplx* psi = impl_->data();
  const cplx* d = impl_->aux_data();
  std::vector<double> j(impl_->grid.n);
  for (std::size_t i = 0; i < impl_->grid.n; ++i) j[i] = std::imag(std::conj(psi[i]) * d[i]);
  return j;
}

double Propagator::flux_at(const WaveState& state, double x_obs) {
  const GridSpec& g = impl_->grid;
  if (!(x_obs >= g.x_min) || !(x_obs < g.x_max)) {
    std::ostringstream msg;
    msg << "observation point " << x_obs << " is outside the grid [" << g.x_min << ", " << g.x_max
        << ")";
    throw RangeError(msg.str());
  }
  impl_->load(state);
  impl_->derivative_into_aux();
  const cplx* psi = impl_->data();
  const cplx* d = impl_->aux_data();

  const double pos = (x_obs - g.x_min) / g.dx();
  auto base = static_cast<std::ptrdiff_t>(std::floor(pos)) - 1;
  base = std::clamp<std::ptrdiff_t>(base, 0, static_cast<std::ptrdiff_t>(g.n) - 4);
  const double s = pos - static_cast<double>(base);  // stencil nodes at s = 0,1,2,3
  double result = 0.0;
  for (int a = 0; a < 4; ++a) {
    double weight = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b != a) weight *= (s - b) / static_cast<double>(a - b);
    }
    const auto idx = static_cast<std::size_t>(base + a);
    result += weight * std::imag(std::conj(psi[idx]) * d[idx]);
  }
  return result;
}

Observables Propagator::observables(const WaveState& state) {
  const GridSpec& g = impl_->grid;
  impl_->load(state);
  const cplx* psi = impl_->data();
  Observables obs;
  double sx = 0.0;
  double s0 = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) {
    const double p = std::norm(psi[j]);
    s0 += p;
    sx += p * g.x(j);
  }
  obs.norm = s0 * g.dx();
  obs.mean_x = sx / s0;

  std::memcpy(impl_->aux, impl_->buffer, g.n * sizeof(cplx));
  fftw_execute(impl_->aux_forward);
  const cplx* spec = impl_->aux_data();
  double p0 = 0.0;
  double pk = 0.0;
  double pk2 = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) {
    const double p = std::norm(spec[j]);
    p0 += p;
    pk += p * impl_->k[j];
    pk2 += p * impl_->k[j] * impl_->k[j];
  }
  obs.mean_k = pk / p0;
  obs.kinetic = 0.5 * pk2 / p0;
  return obs;
}

double Propagator::boundary_amplitude(const WaveState& state) const {
  impl_->load(state);
  return impl_->boundary_amplitude();
}

GridSpec plan_grid(const GridSpec& base, const PacketSpec& packet, std::span<const double> times,
                   std::span<const double> f_track, std::span<const double> phi_track,
                   double margin, double widths) {
  base.validate();
  packet.validate();
  if (times.size() != f_track.size() || times.size() != phi_track.size()) {
    throw UsageError("plan_grid: track lengths differ from the time grid");
  }
  double lo = -widths * packet.sigma;
  double hi = widths * packet.sigma;
  double k_need = widths / packet.sigma;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double w = std::sqrt(spread_width_squared(times[i], packet.sigma));
    lo = std::min(lo, phi_track[i] - widths * w);
    hi = std::max(hi, phi_track[i] + widths * w);
    k_need = std::max(k_need, std::abs(f_track[i]) + widths / packet.sigma);
  }
  lo = std::min(base.x_min, lo - margin);
  hi = std::max(base.x_max, hi + margin);

  const double dx = std::min(base.dx(), std::numbers::pi / k_need);
  std::size_t n = base.n;
  while (static_cast<double>(n) * dx < hi - lo) n *= 2;
  GridSpec grid = base;
  grid.n = n;
  grid.x_min = lo;
  grid.x_max = lo + static_cast<double>(n) * dx;
  if (grid.x_min == base.x_min && n == base.n && dx == base.dx()) grid.x_max = base.x_max;
  return grid;
}

TdseRun tdse_flux_series(double x_obs, std::span<const double> times, const PacketSpec& packet,
                         const FieldFn& field, std::span<const double> f_track,
                         std::span<const double> phi_track, const TdseOptions& options) {
  packet.validate();
  if (times.empty()) throw UsageError("tdse_flux_series needs output times");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || (i > 0 && !(times[i] > times[i - 1]))) {
      throw UsageError("tdse output times must be nonnegative and strictly increasing");
    }
  }
  const GridSpec grid = options.auto_domain ? plan_grid(options.base_grid, packet, times, f_track,
                                                        phi_track, options.margin, options.widths)
                                            : options.base_grid;
  Propagator propagator(grid);
  propagator.set_boundary_tolerance(options.boundary_tolerance);
  WaveState state = init_gaussian(grid, packet);

  TdseRun run;
  run.grid = grid;
  run.flux.x_obs = x_obs;
  run.flux.times.assign(times.begin(), times.end());
  run.flux.values.reserve(times.size());
  for (double t : times) {
    propagator.evolve_to(state, field, t);
    run.flux.values.push_back(propagator.flux_at(state, x_obs));
    run.observables.push_back(propagator.observables(state));
  }
  return run;
}

TdseRun tdse_flux_series(double x_obs, std::span<const double> times, const PacketSpec& packet,
                         const FieldModel& field, const TdseOptions& options) {
  std::vector<double> f(times.size());
  std::vector<double> phi(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    f[i] = field.momentum_gain(times[i]);
    phi[i] = field.displacement(times[i]);
  }
  return tdse_flux_series(
      x_obs, times, packet, [&field](double t) { return field.field_at(t); }, f, phi, options);
}

Snapshot take_snapshot(Propagator& propagator, const WaveState& state) {
  Snapshot snap;
  snap.t = state.t;
  snap.flux = propagator.flux_field(state);
  const GridSpec& g = state.grid;
  snap.x.resize(g.n);
  snap.re.resize(g.n);
  snap.im.resize(g.n);
  snap.density.resize(g.n);
  for (std::size_t j = 0; j < g.n; ++j) {
    snap.x[j] = g.x(j);
    snap.re[j] = state.values[j].real();
    snap.im[j] = state.values[j].imag();
    snap.density[j] = std::norm(state.values[j]);
  }
  return snap;
}

}  // namespace wpflux
