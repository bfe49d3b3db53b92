#pragma once

#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "util.hpp"

namespace tsbench {

/// Ordered, finite, non-empty sequence of reals. Timestamps are implicit
/// (unit sampling interval).
class TimeSeries {
 public:
  TimeSeries() = default;

  explicit TimeSeries(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw DomainError("time series must contain at least one value");
    for (double v : values_) {
      if (!std::isfinite(v)) throw DomainError("time series values must be finite");
    }
  }

  TimeSeries(std::initializer_list<double> values) : TimeSeries(std::vector<double>(values)) {}

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] const std::vector<double>& vector() const noexcept { return values_; }
  [[nodiscard]] auto begin() const noexcept { return values_.begin(); }
  [[nodiscard]] auto end() const noexcept { return values_.end(); }

  operator std::span<const double>() const noexcept { return values_; }  // NOLINT

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<double> values_;
};

struct LabeledSeries {
  TimeSeries series;
  std::string label;

  friend bool operator==(const LabeledSeries&, const LabeledSeries&) = default;
};

struct DatasetStats {
  double avg{0.0};
  /// Population standard deviation over every point of every series.
  double stdv{0.0};
  std::map<std::string, std::size_t> class_histogram;

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

[[nodiscard]] inline DatasetStats compute_stats(std::span<const LabeledSeries> items) {
  DatasetStats stats;
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  for (const auto& item : items) {
    ++stats.class_histogram[item.label];
    for (double v : item.series) {
      ++count;
      const double delta = v - mean;
      mean += delta / static_cast<double>(count);
      m2 += delta * (v - mean);
    }
  }
  stats.avg = mean;
  stats.stdv = count > 0 ? std::sqrt(std::max(0.0, m2 / static_cast<double>(count))) : 0.0;
  return stats;
}

/// Labeled collection of equal-length series. Immutable once built.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::string name, std::vector<LabeledSeries> items)
      : name_(std::move(name)), items_(std::move(items)) {
    if (items_.empty()) throw EmptyInputError("dataset '" + name_ + "' has no records");
    const std::size_t n = items_.front().series.size();
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (items_[i].label.empty()) throw DataError("record " + std::to_string(i + 1) + " has an empty label");
      if (items_[i].series.size() != n) {
        throw ShapeError("record " + std::to_string(i + 1) + " has length " +
                         std::to_string(items_[i].series.size()) + ", expected " + std::to_string(n));
      }
    }
    stats_ = compute_stats(items_);
  }

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const std::vector<LabeledSeries>& items() const noexcept { return items_; }
  [[nodiscard]] const DatasetStats& stats() const noexcept { return stats_; }
  [[nodiscard]] std::size_t size() const noexcept { return items_.size(); }
  [[nodiscard]] std::size_t series_length() const noexcept {
    return items_.empty() ? 0 : items_.front().series.size();
  }
  [[nodiscard]] const LabeledSeries& operator[](std::size_t i) const noexcept { return items_[i]; }

  /// Sub-dataset holding the given item indices, in the given order.
  [[nodiscard]] Dataset subset(std::span<const std::size_t> indices, std::string name = {}) const {
    std::vector<LabeledSeries> picked;
    picked.reserve(indices.size());
    for (auto i : indices) picked.push_back(items_.at(i));
    return Dataset(name.empty() ? name_ : std::move(name), std::move(picked));
  }

 private:
  std::string name_;
  std::vector<LabeledSeries> items_;
  DatasetStats stats_;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  const bool comma = line.find(',') != std::string_view::npos;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    if (comma) {
      const auto next = line.find(',', pos);
      auto field = line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
      while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front()))) field.remove_prefix(1);
      while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back()))) field.remove_suffix(1);
      fields.push_back(field);
      if (next == std::string_view::npos) break;
      pos = next + 1;
    } else {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos >= line.size()) break;
      auto end = pos;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
      fields.push_back(line.substr(pos, end - pos));
      pos = end;
    }
  }
  return fields;
}

}  // namespace detail

/// Reads the UCR archive layout: one record per line, class label first, then
/// the values; comma or whitespace delimited; blank lines and lines starting
/// with '#' are skipped.
[[nodiscard]] inline Dataset parse_ucr(std::istream& in, std::string name = "dataset") {
  std::vector<LabeledSeries> items;
  std::string line;
  std::size_t line_no = 0;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    const auto first = view.find_first_not_of(" \t");
    if (first == std::string_view::npos) continue;
    if (view[first] == '#') continue;
    const auto fields = detail::split_fields(view);
    if (fields.size() < 2) throw ParseError("record needs a label and at least one value", line_no);
    if (fields[0].empty()) throw ParseError("empty class label", line_no);
    std::vector<double> values;
    values.reserve(fields.size() - 1);
    for (std::size_t f = 1; f < fields.size(); ++f) {
      double v = 0.0;
      if (!parse_real(fields[f], v) || !std::isfinite(v)) {
        throw ParseError("non-numeric value '" + std::string(fields[f]) + "' in field " + std::to_string(f + 1),
                         line_no);
      }
      values.push_back(v);
    }
    if (items.empty()) {
      expected = values.size();
    } else if (values.size() != expected) {
      throw ShapeError("line " + std::to_string(line_no) + ": record has " + std::to_string(values.size()) +
                       " values, expected " + std::to_string(expected));
    }
    // Labels such as "1.0000000e+00" are kept verbatim; they are opaque tokens.
    items.push_back({TimeSeries(std::move(values)), std::string(fields[0])});
  }
  if (items.empty()) throw EmptyInputError("input contains no records");
  return Dataset(std::move(name), std::move(items));
}

[[nodiscard]] inline Dataset parse_ucr(std::string_view text, std::string name = "dataset") {
  std::istringstream in{std::string(text)};
  return parse_ucr(in, std::move(name));
}

/// Writes the comma-delimited form with 17 significant digits, which
/// parse_ucr reads back value-exactly.
inline void serialize_ucr(const Dataset& dataset, std::ostream& out) {
  for (const auto& item : dataset.items()) {
    out << item.label;
    for (double v : item.series) out << ',' << format_real(v);
    out << '\n';
  }
}

[[nodiscard]] inline std::string serialize_ucr(const Dataset& dataset) {
  std::ostringstream out;
  serialize_ucr(dataset, out);
  return out.str();
}

/// Mean 0, population standard deviation 1. Series whose standard deviation
/// is below 1e-12 map to all zeros.
[[nodiscard]] inline TimeSeries z_normalize(std::span<const double> series) {
  const auto n = static_cast<double>(series.size());
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : series) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  std::vector<double> out(series.size(), 0.0);
  if (sd >= 1e-12) {
    for (std::size_t i = 0; i < series.size(); ++i) out[i] = (series[i] - mean) / sd;
  }
  return TimeSeries(std::move(out));
}

/// Divides every value by the dataset-wide maximum absolute value.
[[nodiscard]] inline Dataset max_scale_normalize(const Dataset& dataset) {
  double max_abs = 0.0;
  for (const auto& item : dataset.items()) {
    for (double v : item.series) max_abs = std::max(max_abs, std::abs(v));
  }
  if (max_abs == 0.0) return dataset;
  std::vector<LabeledSeries> items;
  items.reserve(dataset.size());
  for (const auto& item : dataset.items()) {
    std::vector<double> values(item.series.begin(), item.series.end());
    for (auto& v : values) v /= max_abs;
    items.push_back({TimeSeries(std::move(values)), item.label});
  }
  return Dataset(dataset.name(), std::move(items));
}

[[nodiscard]] inline Dataset z_normalize(const Dataset& dataset) {
  std::vector<LabeledSeries> items;
  items.reserve(dataset.size());
  for (const auto& item : dataset.items()) items.push_back({z_normalize(item.series.values()), item.label});
  return Dataset(dataset.name(), std::move(items));
}

/// Archive preprocessing: max-scale the whole dataset, then z-normalize each
/// series.
[[nodiscard]] inline Dataset normalize_archive(const Dataset& dataset) {
  return z_normalize(max_scale_normalize(dataset));
}

/// Partitions item indices into k stratified subsets. Each class is shuffled
/// and dealt round-robin; the dealing position carries over between classes
/// so subset sizes stay balanced too. Indices inside a subset are ascending.
[[nodiscard]] inline std::vector<std::vector<std::size_t>> stratified_split_indices(
    std::span<const LabeledSeries> items, std::size_t k, std::uint64_t seed) {
  if (k < 1) throw SizeError("stratified split needs k >= 1");
  if (k > items.size()) {
    throw SizeError("cannot split " + std::to_string(items.size()) + " items into " + std::to_string(k) +
                    " subsets");
  }
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < items.size(); ++i) by_class[items[i].label].push_back(i);

  Rng rng(mix_seed(seed));
  std::vector<std::vector<std::size_t>> subsets(k);
  std::size_t cursor = 0;
  for (auto& [label, members] : by_class) {
    shuffle(members, rng);
    for (auto idx : members) {
      subsets[cursor].push_back(idx);
      cursor = (cursor + 1) % k;
    }
  }
  for (auto& s : subsets) std::sort(s.begin(), s.end());
  return subsets;
}

[[nodiscard]] inline std::vector<Dataset> stratified_split(const Dataset& dataset, std::size_t k,
                                                           std::uint64_t seed) {
  if (k < 2) throw SizeError("stratified split needs k >= 2");
  const auto parts = stratified_split_indices(dataset.items(), k, seed);
  std::vector<Dataset> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back(dataset.subset(parts[i], dataset.name() + "#" + std::to_string(i)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic generators

enum class CbfClass { cylinder, bell, funnel };

/// Noise controls for CBF; the literature form uses standard normals for both.
struct CbfParams {
  double amplitude_noise_sd{1.0};
  double point_noise_sd{1.0};
};

/// Cylinder-Bell-Funnel: (6 + eta) * shape(t) on [a, b] plus N(0,1) noise,
/// a ~ U{16..32}, b - a ~ U{32..96}. The event is clipped to the series end.
[[nodiscard]] inline TimeSeries gen_cbf(CbfClass cls, std::size_t length, Rng& rng, CbfParams params = {}) {
  if (length < 64) throw DomainError("CBF series need length >= 64");
  const auto a = uniform_int(rng, 16, 32);
  const auto b = std::min<std::int64_t>(a + uniform_int(rng, 32, 96), static_cast<std::int64_t>(length) - 1);
  const double eta = params.amplitude_noise_sd * standard_normal(rng);
  const double width = static_cast<double>(b - a);
  std::vector<double> out(length);
  for (std::size_t i = 0; i < length; ++i) {
    const auto t = static_cast<std::int64_t>(i);
    double shape = 0.0;
    if (t >= a && t <= b) {
      switch (cls) {
        case CbfClass::cylinder: shape = 1.0; break;
        case CbfClass::bell: shape = static_cast<double>(t - a) / width; break;
        case CbfClass::funnel: shape = static_cast<double>(b - t) / width; break;
      }
    }
    out[i] = (6.0 + eta) * shape + params.point_noise_sd * standard_normal(rng);
  }
  return TimeSeries(std::move(out));
}

enum class StepOrientation { up, down };

/// Two-Patterns classes: the ordered orientations of the two embedded steps.
enum class TwoPatternsClass { up_up, up_down, down_up, down_down };

[[nodiscard]] constexpr std::pair<StepOrientation, StepOrientation> orientations(TwoPatternsClass c) noexcept {
  switch (c) {
    case TwoPatternsClass::up_up: return {StepOrientation::up, StepOrientation::up};
    case TwoPatternsClass::up_down: return {StepOrientation::up, StepOrientation::down};
    case TwoPatternsClass::down_up: return {StepOrientation::down, StepOrientation::up};
    case TwoPatternsClass::down_down: return {StepOrientation::down, StepOrientation::down};
  }
  return {StepOrientation::up, StepOrientation::up};
}

/// Two noiseless step patterns (an "up" step is -5 then +5, "down" the
/// reverse) of length U{n/8..n/4}; the first starts in the left half, the
/// second in the right half, so they never overlap. Background is N(0,1).
[[nodiscard]] inline TimeSeries gen_two_patterns(TwoPatternsClass cls, std::size_t length, Rng& rng) {
  if (length < 64) throw DomainError("Two-Patterns series need length >= 64");
  const auto n = static_cast<std::int64_t>(length);
  std::vector<double> out(length);
  for (auto& v : out) v = standard_normal(rng);
  const auto [first, second] = orientations(cls);
  auto embed = [&](StepOrientation o, std::int64_t lo, std::int64_t hi_start, std::int64_t len) {
    const auto start = uniform_int(rng, lo, hi_start);
    const double low = o == StepOrientation::up ? -5.0 : 5.0;
    for (std::int64_t t = 0; t < len; ++t) out[static_cast<std::size_t>(start + t)] = t < len / 2 ? low : -low;
  };
  const auto len1 = uniform_int(rng, n / 8, n / 4);
  const auto len2 = uniform_int(rng, n / 8, n / 4);
  embed(first, 0, n / 2 - len1, len1);
  embed(second, n / 2, n - len2, len2);
  return TimeSeries(std::move(out));
}

/// Cumulative sum of standard normal steps, z-normalized.
[[nodiscard]] inline TimeSeries gen_random_walk(std::size_t length, Rng& rng) {
  if (length < 1) throw DomainError("random walk needs length >= 1");
  std::vector<double> out(length);
  double acc = 0.0;
  for (auto& v : out) {
    acc += standard_normal(rng);
    v = acc;
  }
  return z_normalize(out);
}

/// Sum of three sinusoids with random low frequencies (0.5 to 3 cycles over
/// the series), amplitudes and phases, plus N(0, 0.05^2) noise; z-normalized.
[[nodiscard]] inline TimeSeries gen_smooth(std::size_t length, Rng& rng, double noise_sd = 0.05) {
  if (length < 1) throw DomainError("smooth series needs length >= 1");
  struct Wave {
    double amp, freq, phase;
  };
  Wave waves[3];
  for (auto& w : waves) {
    w.amp = uniform_real(rng, 0.5, 1.5);
    w.freq = uniform_real(rng, 0.5, 3.0);
    w.phase = uniform_real(rng, 0.0, 2.0 * M_PI);
  }
  std::vector<double> out(length);
  const auto n = static_cast<double>(length);
  for (std::size_t t = 0; t < length; ++t) {
    double v = 0.0;
    for (const auto& w : waves) v += w.amp * std::sin(2.0 * M_PI * w.freq * static_cast<double>(t) / n + w.phase);
    out[t] = v + noise_sd * standard_normal(rng);
  }
  return z_normalize(out);
}

/// Strongly periodic source: a dominant single-cycle sinusoid with random
/// phase, a weaker second harmonic and light noise; z-normalized.
[[nodiscard]] inline TimeSeries gen_periodic(std::size_t length, Rng& rng) {
  if (length < 1) throw DomainError("periodic series needs length >= 1");
  const double phase1 = uniform_real(rng, 0.0, 2.0 * M_PI);
  const double phase2 = uniform_real(rng, 0.0, 2.0 * M_PI);
  const double amp2 = uniform_real(rng, 0.1, 0.3);
  std::vector<double> out(length);
  const auto n = static_cast<double>(length);
  for (std::size_t t = 0; t < length; ++t) {
    const double x = 2.0 * M_PI * static_cast<double>(t) / n;
    out[t] = std::sin(x + phase1) + amp2 * std::sin(2.0 * x + phase2) + 0.02 * standard_normal(rng);
  }
  return z_normalize(out);
}

/// Bursty source: a quiet, lightly noisy baseline with one rectangular burst
/// of random height and position.
[[nodiscard]] inline TimeSeries gen_bursty(std::size_t length, Rng& rng) {
  if (length < 8) throw DomainError("bursty series needs length >= 8");
  const auto n = static_cast<std::int64_t>(length);
  std::vector<double> out(length);
  for (auto& v : out) v = 0.02 * standard_normal(rng);
  const auto width = uniform_int(rng, std::max<std::int64_t>(1, n / 16), std::max<std::int64_t>(1, n / 4));
  const auto start = uniform_int(rng, 0, n - width);
  const double height = uniform_real(rng, 2.0, 6.0) * (uniform01(rng) < 0.5 ? -1.0 : 1.0);
  for (auto t = start; t < start + width; ++t) out[static_cast<std::size_t>(t)] += height;
  return z_normalize(out);
}

/// Named generator families available to the drivers.
enum class Generator { cbf, two_patterns, random_walk, smooth, periodic, bursty };

[[nodiscard]] inline std::string_view generator_name(Generator g) noexcept {
  switch (g) {
    case Generator::cbf: return "cbf";
    case Generator::two_patterns: return "two_patterns";
    case Generator::random_walk: return "random_walk";
    case Generator::smooth: return "smooth";
    case Generator::periodic: return "periodic";
    case Generator::bursty: return "bursty";
  }
  return "?";
}

[[nodiscard]] inline Generator parse_generator(std::string_view name) {
  for (auto g : {Generator::cbf, Generator::two_patterns, Generator::random_walk, Generator::smooth,
                 Generator::periodic, Generator::bursty}) {
    if (generator_name(g) == name) return g;
  }
  throw ConfigError("unknown generator '" + std::string(name) +
                    "' (valid: cbf, two_patterns, random_walk, smooth, periodic, bursty)");
}

[[nodiscard]] inline std::size_t class_count(Generator g) noexcept {
  switch (g) {
    case Generator::cbf: return 3;
    case Generator::two_patterns: return 4;
    default: return 1;
  }
}

/// One labeled sample from class `cls` (labels are 1-based class numbers).
[[nodiscard]] inline LabeledSeries gen_labeled(Generator g, std::size_t cls, std::size_t length, Rng& rng) {
  switch (g) {
    case Generator::cbf:
      return {gen_cbf(static_cast<CbfClass>(cls % 3), length, rng), std::to_string(cls % 3 + 1)};
    case Generator::two_patterns:
      return {gen_two_patterns(static_cast<TwoPatternsClass>(cls % 4), length, rng), std::to_string(cls % 4 + 1)};
    case Generator::random_walk: return {gen_random_walk(length, rng), "1"};
    case Generator::smooth: return {gen_smooth(length, rng), "1"};
    case Generator::periodic: return {gen_periodic(length, rng), "1"};
    case Generator::bursty: return {gen_bursty(length, rng), "1"};
  }
  throw ConfigError("unknown generator");
}

/// `per_class` samples of every class, classes interleaved.
[[nodiscard]] inline Dataset gen_dataset(Generator g, std::size_t per_class, std::size_t length, std::uint64_t seed) {
  Rng rng(mix_seed(seed));
  std::vector<LabeledSeries> items;
  const auto classes = class_count(g);
  items.reserve(per_class * classes);
  for (std::size_t i = 0; i < per_class; ++i) {
    for (std::size_t c = 0; c < classes; ++c) items.push_back(gen_labeled(g, c, length, rng));
  }
  return Dataset(std::string(generator_name(g)), std::move(items));
}

/// `count` i.i.d. samples with uniformly random classes.
[[nodiscard]] inline Dataset gen_iid(Generator g, std::size_t count, std::size_t length, std::uint64_t seed) {
  Rng rng(mix_seed(seed));
  std::vector<LabeledSeries> items;
  items.reserve(count);
  const auto classes = static_cast<std::int64_t>(class_count(g));
  for (std::size_t i = 0; i < count; ++i) {
    const auto cls = static_cast<std::size_t>(uniform_int(rng, 0, classes - 1));
    items.push_back(gen_labeled(g, cls, length, rng));
  }
  return Dataset(std::string(generator_name(g)), std::move(items));
}

}  // namespace tsbench
