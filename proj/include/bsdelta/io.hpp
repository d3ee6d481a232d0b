#pragma once

#include "bsdelta/box_grid.hpp"
#include "bsdelta/grid.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace bsdelta {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, round-trip exact.
std::string format_double(double x);

/**
 * GridFunction file: 16-byte header (dim u32, n_per_axis u32, half_extent f64),
 * then interleaved (re, im) f64 samples. Little-endian throughout.
 */
void write_grid_function(const std::filesystem::path& path, const GridFunction& f);
GridFunction read_grid_function(const std::filesystem::path& path);

/**
 * Slice-field file: the GridFunction header followed by (n_slices u32,
 * reserved u32 = 0), n_slices f64 normal coordinates, then the slices one
 * after another as interleaved (re, im) f64.
 */
void write_slice_field(const std::filesystem::path& path, const SliceField<double>& f);
void write_slice_field(const std::filesystem::path& path, const SliceField<Complex>& f);
SliceField<Complex> read_slice_field(const std::filesystem::path& path);

/// Minimal CSV writer: header row, then numeric or preformatted cells.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& values);
  std::string str() const { return text_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::string text_;
};

/// Writes text to a file in binary mode (no newline translation).
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace bsdelta
