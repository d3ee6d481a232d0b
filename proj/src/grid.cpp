#include "bsdelta/grid.hpp"

#include <unsupported/Eigen/FFT>

#include <vector>

namespace bsdelta {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Plans are cached per thread; results do not depend on which thread runs.
Eigen::FFT<double>& thread_fft() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return fft;
}

void fft_lines(std::vector<Complex>& data, int n, int count, int stride, int line_step, bool inverse) {
  auto& fft = thread_fft();
  std::vector<Complex> in(n), out(n);
  for (int line = 0; line < count; ++line) {
    const std::size_t base = std::size_t(line) * line_step;
    for (int j = 0; j < n; ++j) in[j] = data[base + std::size_t(j) * stride];
    if (inverse)
      fft.inv(out, in);
    else
      fft.fwd(out, in);
    for (int j = 0; j < n; ++j) data[base + std::size_t(j) * stride] = out[j];
  }
}

// Unnormalized DFT over all axes, in place.
void raw_dft(const Grid& grid, std::vector<Complex>& data, bool inverse) {
  const int n = grid.n_per_axis();
  if (grid.dim() == 1) {
    fft_lines(data, n, 1, 1, n, inverse);
  } else {
    fft_lines(data, n, n, 1, n, inverse);  // rows
    fft_lines(data, n, n, n, 1, inverse);  // columns
  }
}

std::vector<Complex> to_std(const Eigen::VectorXcd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXcd from_std(const std::vector<Complex>& v) {
  return Eigen::Map<const Eigen::VectorXcd>(v.data(), Index(v.size()));
}

// (-1)^(sum of storage indices): the exp(i k L) factor from x_0 = -L.
double origin_phase(const Grid& grid, Index cell) {
  const auto idx = grid.axis_indices(cell);
  const int s = grid.dim() == 1 ? idx[0] : idx[0] + idx[1];
  return (s % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

Grid::Grid(int dim, int n_per_axis, double half_extent) : dim_(dim), n_(n_per_axis), half_extent_(half_extent) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid: dim must be 1 or 2, got " + std::to_string(dim));
  if (n_per_axis < 4 || !is_power_of_two(n_per_axis))
    throw std::invalid_argument("grid: n_per_axis must be a power of two >= 4, got " + std::to_string(n_per_axis));
  if (!(half_extent > 0.0) || !std::isfinite(half_extent))
    throw std::invalid_argument("grid: half_extent must be positive");
}

Grid make_grid(int dim, int n_per_axis, double half_extent) { return Grid(dim, n_per_axis, half_extent); }

std::array<double, 2> Grid::position(Index cell) const {
  const auto idx = axis_indices(cell);
  if (dim_ == 1) return {coordinate(idx[0]), 0.0};
  return {coordinate(idx[0]), coordinate(idx[1])};
}

long long Grid::squared_lattice_radius(Index cell) const {
  const auto idx = axis_indices(cell);
  const long long a = idx[0] - n_ / 2;
  if (dim_ == 1) return a * a;
  const long long b = idx[1] - n_ / 2;
  return a * a + b * b;
}

double Grid::sup_radius(Index cell) const {
  const auto p = position(cell);
  return std::max(std::abs(p[0]), std::abs(p[1]));
}

double Grid::frequency_norm_sq(Index cell) const {
  const auto idx = axis_indices(cell);
  const double k0 = frequency(idx[0]);
  if (dim_ == 1) return k0 * k0;
  const double k1 = frequency(idx[1]);
  return k0 * k0 + k1 * k1;
}

GridFunction to_complex(const RealGridFunction& f) {
  return {f.grid(), f.samples().cast<Complex>()};
}

RealGridFunction real_part(const GridFunction& f, double imag_tol) {
  const double worst = f.samples().imag().cwiseAbs().maxCoeff();
  if (worst > imag_tol)
    throw std::invalid_argument("real_part: imaginary component " + std::to_string(worst) + " exceeds tolerance");
  return {f.grid(), f.samples().real()};
}

GridFunction transform(const GridFunction& f, Direction direction) {
  const Grid& g = f.grid();
  auto data = to_std(f.samples());
  const bool inverse = direction == Direction::inverse;
  const double w = (inverse ? g.dual_spacing() : g.spacing()) / std::sqrt(2.0 * std::numbers::pi);
  const double scale = std::pow(w, g.dim());
  if (inverse)
    for (Index c = 0; c < g.cell_count(); ++c) data[c] *= origin_phase(g, c);
  raw_dft(g, data, inverse);
  for (Index c = 0; c < g.cell_count(); ++c) data[c] *= inverse ? scale : scale * origin_phase(g, c);
  return {g, from_std(data)};
}

double norm(const GridFunction& f, NormKind kind) {
  const Grid& g = f.grid();
  if (kind == NormKind::L2) return std::sqrt(f.samples().squaredNorm() * g.cell_volume());
  const auto m = frequency_multiplier(g, [](double k2) { return std::sqrt(1.0 + k2); });
  return std::sqrt(spectral_quadratic_form(f, m));
}

Complex inner_product(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("inner_product: grid mismatch");
  // Eigen's dot conjugates the first argument.
  return g.samples().dot(f.samples()) * f.grid().cell_volume();
}

double inner_product(const RealGridFunction& f, const RealGridFunction& g) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("inner_product: grid mismatch");
  return f.samples().dot(g.samples()) * f.grid().cell_volume();
}

GridFunction fourier_multiply(const GridFunction& f, const Eigen::VectorXd& multiplier) {
  const Grid& g = f.grid();
  if (multiplier.size() != g.cell_count()) throw std::invalid_argument("fourier_multiply: multiplier size mismatch");
  auto data = to_std(f.samples());
  raw_dft(g, data, false);
  const double inv_n = 1.0 / double(g.cell_count());
  for (Index c = 0; c < g.cell_count(); ++c) data[c] *= multiplier[c] * inv_n;
  raw_dft(g, data, true);
  return {g, from_std(data)};
}

Eigen::VectorXd fourier_multiply(const Grid& grid, const Eigen::VectorXd& real_samples,
                                 const Eigen::VectorXd& multiplier) {
  if (real_samples.size() != grid.cell_count() || multiplier.size() != grid.cell_count())
    throw std::invalid_argument("fourier_multiply: size mismatch");
  std::vector<Complex> data(real_samples.data(), real_samples.data() + real_samples.size());
  raw_dft(grid, data, false);
  const double inv_n = 1.0 / double(grid.cell_count());
  for (Index c = 0; c < grid.cell_count(); ++c) data[c] *= multiplier[c] * inv_n;
  raw_dft(grid, data, true);
  Eigen::VectorXd out(grid.cell_count());
  for (Index c = 0; c < grid.cell_count(); ++c) out[c] = data[c].real();
  return out;
}

double spectral_quadratic_form(const GridFunction& f, const Eigen::VectorXd& multiplier) {
  const auto fh = transform(f, Direction::forward);
  return (multiplier.array() * fh.samples().array().abs2()).sum() * f.grid().dual_cell_volume();
}

}  // namespace bsdelta
