#include "bsdelta/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace bsdelta {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, const std::filesystem::path& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw FormatError("truncated file: " + path.string());
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot open for writing: " + path.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open for reading: " + path.string());
  return is;
}

void put_header(std::ostream& os, const Grid& g) {
  put<std::uint32_t>(os, std::uint32_t(g.dim()));
  put<std::uint32_t>(os, std::uint32_t(g.n_per_axis()));
  put<double>(os, g.half_extent());
}

Grid get_header(std::istream& is, const std::filesystem::path& path) {
  const auto dim = get<std::uint32_t>(is, path);
  const auto n = get<std::uint32_t>(is, path);
  const auto L = get<double>(is, path);
  try {
    return Grid(int(dim), int(n), L);
  } catch (const std::invalid_argument& e) {
    throw FormatError(path.string() + ": bad header: " + e.what());
  }
}

template <typename Scalar>
void put_samples(std::ostream& os, const Scalar* data, Index count) {
  for (Index i = 0; i < count; ++i) {
    const Complex z(data[i]);
    put<double>(os, z.real());
    put<double>(os, z.imag());
  }
}

template <typename Scalar>
void write_slices(const std::filesystem::path& path, const SliceField<Scalar>& f) {
  auto os = open_out(path);
  put_header(os, f.transverse());
  put<std::uint32_t>(os, std::uint32_t(f.slice_count()));
  put<std::uint32_t>(os, 0u);
  for (double x : f.normal_coordinates()) put<double>(os, x);
  for (Index s = 0; s < f.slice_count(); ++s) put_samples(os, f.values().col(s).data(), f.values().rows());
  if (!os) throw FormatError("write failed: " + path.string());
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_grid_function(const std::filesystem::path& path, const GridFunction& f) {
  auto os = open_out(path);
  put_header(os, f.grid());
  put_samples(os, f.samples().data(), f.size());
  if (!os) throw FormatError("write failed: " + path.string());
}

GridFunction read_grid_function(const std::filesystem::path& path) {
  auto is = open_in(path);
  const Grid g = get_header(is, path);
  Eigen::VectorXcd samples(g.cell_count());
  for (Index i = 0; i < samples.size(); ++i) {
    const double re = get<double>(is, path);
    const double im = get<double>(is, path);
    samples[i] = {re, im};
  }
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes in " + path.string());
  try {
    return {g, std::move(samples)};
  } catch (const std::invalid_argument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_slice_field(const std::filesystem::path& path, const SliceField<double>& f) { write_slices(path, f); }
void write_slice_field(const std::filesystem::path& path, const SliceField<Complex>& f) { write_slices(path, f); }

SliceField<Complex> read_slice_field(const std::filesystem::path& path) {
  auto is = open_in(path);
  const Grid g = get_header(is, path);
  const auto n_slices = get<std::uint32_t>(is, path);
  (void)get<std::uint32_t>(is, path);
  std::vector<double> xs(n_slices);
  for (auto& x : xs) x = get<double>(is, path);
  Eigen::MatrixXcd values(g.cell_count(), Index(n_slices));
  for (Index s = 0; s < values.cols(); ++s)
    for (Index i = 0; i < values.rows(); ++i) {
      const double re = get<double>(is, path);
      const double im = get<double>(is, path);
      values(i, s) = {re, im};
    }
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes in " + path.string());
  return {g, std::move(xs), std::move(values)};
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::invalid_argument("csv: row width differs from header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  row(cells);
}

void CsvWriter::save(const std::filesystem::path& path) const { write_text(path, text_); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto os = open_out(path);
  os << text;
  if (!os) throw FormatError("write failed: " + path.string());
}

}  // namespace bsdelta
