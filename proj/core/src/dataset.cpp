#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "eveopt/error.hpp"
#include "eveopt/problems.hpp"
#include "eveopt/rng.hpp"
#include "eveopt/text.hpp"

namespace eveopt::problems {

namespace {
constexpr double kTruncation = 3.0;
}

Dataset make_blobs(std::uint64_t seed, std::size_t n, std::size_t d, std::size_t classes, double separation) {
  if (n == 0 || d == 0) throw ContractError("make_blobs: n and d must be positive");
  if (classes < 2 || classes > 2 * d) throw ContractError("make_blobs: need 2 <= classes <= 2d");
  if (n % classes != 0) throw ContractError("make_blobs: n must be divisible by the class count");
  if (!(separation >= 0.0) || !std::isfinite(separation)) throw ContractError("make_blobs: bad separation");

  Dataset data{n, d, classes, seed, Vector(n * d), std::vector<std::size_t>(n)};
  Rng rng(derive_seed(seed, streams::dataset));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = i % classes;
    data.labels[i] = k;
    const std::size_t axis = k % d;
    const double sign = k < d ? 1.0 : -1.0;
    for (std::size_t j = 0; j < d; ++j) {
      double z;
      do {
        z = rng.normal();
      } while (std::abs(z) > kTruncation);
      data.features[i * d + j] = (j == axis ? sign * separation : 0.0) + z;
    }
  }
  return data;
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  for (std::size_t j = 0; j < data.d; ++j) out << 'x' << j << ',';
  out << "label\n";
  for (std::size_t i = 0; i < data.n; ++i) {
    for (double v : data.row(i)) out << text::format_double(v) << ',';
    out << data.labels[i] << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ContractError("dataset csv: missing header");
  const auto header = text::split(text::trim(line), ',');
  if (header.size() < 2 || header.back() != "label") throw ContractError("dataset csv: bad header");

  Dataset data;
  data.d = header.size() - 1;
  std::size_t max_label = 0;
  while (std::getline(in, line)) {
    const auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    const auto fields = text::split(trimmed, ',');
    if (fields.size() != data.d + 1) throw ContractError("dataset csv: ragged row");
    for (std::size_t j = 0; j < data.d; ++j) {
      const auto v = text::parse_double(fields[j]);
      if (!v) throw ContractError("dataset csv: bad feature value");
      data.features.push_back(*v);
    }
    const auto label = text::parse_uint(fields.back());
    if (!label) throw ContractError("dataset csv: bad label");
    data.labels.push_back(static_cast<std::size_t>(*label));
    max_label = std::max<std::size_t>(max_label, static_cast<std::size_t>(*label));
    ++data.n;
  }
  data.classes = data.n == 0 ? 0 : max_label + 1;
  return data;
}

}  // namespace eveopt::problems
