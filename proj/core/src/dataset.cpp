#include "setadam/dataset.hpp"

#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "setadam/rng.hpp"

namespace setadam {

std::span<const real> Dataset::row(std::size_t i) const {
  if (i >= rows) {
    throw std::out_of_range("Dataset: row index out of range");
  }
  return std::span<const real>(features).subspan(i * cols, cols);
}

bool Dataset::single_class() const {
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (labels[i] != labels[0]) return false;
  }
  return true;
}

Dataset make_two_moons(std::size_t n, real noise, std::uint64_t seed) {
  if (n < 2) {
    throw std::invalid_argument("make_two_moons: n must be >= 2");
  }
  constexpr real pi = 3.1415926535897932384626433832795;
  const std::size_t n0 = (n + 1) / 2;
  const std::size_t n1 = n - n0;

  Dataset d;
  d.rows = n;
  d.cols = 2;
  d.seed = seed;
  d.features.reserve(2 * n);
  d.labels.reserve(n);
  CounterRng rng(seed);

  auto emit = [&](real x, real y, real label) {
    if (noise != 0) {
      x += noise * static_cast<real>(rng.next_normal());
      y += noise * static_cast<real>(rng.next_normal());
    }
    d.features.push_back(x);
    d.features.push_back(y);
    d.labels.push_back(label);
  };

  for (std::size_t i = 0; i < n0; ++i) {
    const real t = n0 > 1 ? pi * static_cast<real>(i) / static_cast<real>(n0 - 1) : 0;
    emit(std::cos(t), std::sin(t), 0);
  }
  for (std::size_t i = 0; i < n1; ++i) {
    const real t = n1 > 1 ? pi * static_cast<real>(i) / static_cast<real>(n1 - 1) : 0;
    emit(1 - std::cos(t), real(0.5) - std::sin(t), 1);
  }
  return d;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

real parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  double value = 0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\t' ||
                           *(last - 1) == '\r')) --last;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw std::runtime_error("load_csv_dataset: non-numeric cell in column '" +
                             column + "' at data row " + std::to_string(row));
  }
  return static_cast<real>(value);
}

}  // namespace

Dataset load_csv_dataset(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_csv_dataset: cannot open '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("load_csv_dataset: '" + path + "' is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);

  std::size_t label_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == label_column) {
      label_idx = i;
      break;
    }
  }
  if (label_idx == header.size()) {
    throw std::runtime_error("load_csv_dataset: label column '" + label_column +
                             "' not found in header of '" + path + "'");
  }

  Dataset d;
  d.cols = header.size() - 1;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("load_csv_dataset: data row " + std::to_string(row) +
                               " has " + std::to_string(cells.size()) +
                               " cells, header has " + std::to_string(header.size()));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const real value = parse_cell(cells[i], row, header[i]);
      if (i == label_idx) {
        d.labels.push_back(value);
      } else {
        d.features.push_back(value);
      }
    }
    ++row;
  }
  if (row == 0) {
    throw std::runtime_error("load_csv_dataset: '" + path + "' has no data rows");
  }
  d.rows = row;
  return d;
}

}  // namespace setadam
