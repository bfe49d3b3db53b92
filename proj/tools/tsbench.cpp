// tsbench command-line driver: classify, tlb, scan, converge, gen, grid.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include <nlohmann/json.hpp>

#include "tsbench/tsbench.hpp"

namespace {

using namespace tsbench;
using nlohmann::json;

/// Options every command accepts.
struct Common {
  std::optional<std::uint64_t> seed;
  std::size_t threads{1};
  std::string out{"-"};
  std::string json_path;
  std::string config;
};

void add_common(CLI::App* cmd, Common& c, bool randomized) {
  if (randomized) cmd->add_option("--seed", c.seed, "Random seed (required)");
  cmd->add_option("--threads", c.threads, "Worker threads; output does not depend on it")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "CSV output path, '-' for stdout");
  cmd->add_option("--json", c.json_path, "Also write the table as JSON to this path");
  cmd->add_option("--config", c.config, "key=value file using the flag names; explicit flags win");
}

std::uint64_t require_seed(const Common& c) {
  if (!c.seed) throw ConfigError("this command is randomized and needs --seed");
  return *c.seed;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file: " + path);
  return parse_ucr(in, std::filesystem::path(path).stem().string());
}

/// Parses one CSV table (as written by this tool) into an array of objects
/// keyed by the header; numeric cells become numbers.
json csv_to_json(const std::string& csv) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (quoted) {
        if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (ch == '"') {
          quoted = false;
        } else {
          cur += ch;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        cells.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += ch;
      }
    }
    cells.push_back(std::move(cur));
    return cells;
  };
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  const auto header = split(line);
  json rows = json::array();
  while (std::getline(in, line)) {
    const auto cells = split(line);
    json row = json::object();
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) {
      double v = 0.0;
      if (parse_real(cells[i], v) && std::isfinite(v)) row[header[i]] = v;
      else row[header[i]] = cells[i];
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write output file: " + path);
  f << text;
  if (!f) throw DataError("failed writing output file: " + path);
}

/// Writes the CSV table and, if requested, its JSON mirror.
void emit(const Common& c, const std::string& command, const std::string& csv, json extra = json::object()) {
  write_text(c.out, csv);
  if (!c.json_path.empty()) {
    json doc = std::move(extra);
    doc["command"] = command;
    doc["rows"] = csv_to_json(csv);
    write_text(c.json_path, doc.dump(2) + "\n");
  }
}

/// Console notes go to stdout when the table goes to a file, else stderr.
std::ostream& console(const Common& c) { return c.out.empty() || c.out == "-" ? std::cerr : std::cout; }

/// Reads `key=value` lines and returns them as `--key=value` arguments,
/// skipping keys already given on the command line.
std::vector<std::string> config_args(const std::string& path, const std::vector<std::string>& explicit_args) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::vector<std::string> out;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.starts_with("--")) key = key.substr(2);
    if (key.empty() || key == "config") throw ConfigError(path + ":" + std::to_string(lineno) + ": invalid key");
    const std::string flag = "--" + key;
    const bool given = std::any_of(explicit_args.begin(), explicit_args.end(), [&](const std::string& a) {
      return a == flag || a.starts_with(flag + "=");
    });
    if (!given) out.push_back(flag + "=" + value);
  }
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::vector<std::string>& items, T (*parse)(std::string_view)) {
  std::vector<T> out;
  for (const auto& s : items) out.push_back(parse(s));
  return out;
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
  Common c;
  std::string data;
  std::string measure{"l2"};
  std::size_t k{10};
  bool conventional{false};
  bool no_normalize{false};
};

void cmd_classify(const ClassifyArgs& a) {
  CrossValidationConfig cfg;
  cfg.seed = require_seed(a.c);
  cfg.k = a.k;
  cfg.conventional = a.conventional;
  cfg.threads = a.c.threads;
  if (a.k < 2) throw ConfigError("--k must be at least 2");
  auto dataset = load_dataset(a.data);
  if (!a.no_normalize) dataset = normalize_archive(dataset);
  ParameterGrid grid;
  if (a.measure.find(':') != std::string::npos) {
    const auto spec = parse_measure_spec(a.measure);
    grid = {spec.kind, {spec}};
  } else {
    grid = parameter_grid(parse_measure_kind(a.measure), compute_stats(dataset.items()), dataset.series_length());
  }
  const auto report = cross_validate(dataset, grid, cfg);
  std::ostringstream csv;
  write_csv(report, csv);
  emit(a.c, "classify", csv.str(), json{{"summary", summary_line(report)}, {"mean", report.mean}, {"std", report.stdev}});
  console(a.c) << summary_line(report) << '\n';
}

struct TlbArgs {
  Common c;
  std::string source{"random_walk"};
  std::string data;
  std::vector<std::size_t> lengths{480, 960, 1440, 1920};
  std::vector<std::size_t> ks{4, 6, 8, 10};
  std::size_t trials{1000};
  std::vector<std::string> methods{"PAA", "APCA", "DFT", "DCT", "DWT", "SAX", "CHEB", "IPLA"};
};

void cmd_tlb(const TlbArgs& a) {
  TlbExperimentConfig cfg;
  cfg.seed = require_seed(a.c);
  cfg.methods = parse_list<Method>(a.methods, &parse_method);
  cfg.lengths = a.lengths;
  cfg.ks = a.ks;
  cfg.trials = a.trials;
  cfg.threads = a.c.threads;
  for (auto n : cfg.lengths) {
    for (auto k : cfg.ks) {
      for (auto m : cfg.methods) validate(ReductionConfig{m, k, n});
    }
  }
  const auto source = a.data.empty() ? SeriesSource::from_generator(parse_generator(a.source))
                                     : SeriesSource::from_dataset(load_dataset(a.data));
  const auto report = tlb_experiment(source, cfg);
  std::ostringstream csv;
  write_csv(report, csv);
  json clamps = json::array();
  for (const auto& r : report.rows) {
    clamps.push_back({{"method", method_name(r.method)}, {"n", r.n}, {"k", r.k}, {"clamp_events", r.clamp_events}});
  }
  emit(a.c, "tlb", csv.str(), json{{"source", report.source}, {"clamp_events", clamps}});
}

struct ScanArgs {
  Common c;
  std::string data;
  std::string generator{"smooth"};
  std::size_t length{1024};
  std::vector<std::size_t> sizes{512, 1024, 2048};
  double delta{0.10};
  std::vector<std::string> bounds{"none", "keogh", "magic0.50", "magic1.00"};
  std::size_t queries{30};
  std::string ordering{"natural"};
  bool early_abandon{false};
  bool no_timing{false};
  std::size_t tightness_samples{1000};
};

void cmd_scan(const ScanArgs& a) {
  const auto seed = require_seed(a.c);
  if (a.delta < 0.0 || a.delta > 1.0) throw ConfigError("--delta must lie in [0, 1]");
  if (a.queries < 1) throw ConfigError("--queries must be at least 1");
  MagicExperimentConfig cfg;
  cfg.sizes = a.sizes;
  std::sort(cfg.sizes.begin(), cfg.sizes.end());
  cfg.bounds = parse_list<Bound>(a.bounds, &parse_bound);
  if (a.ordering == "natural") cfg.ordering = Ordering::natural;
  else if (a.ordering == "sorted") cfg.ordering = Ordering::sorted_by_lb;
  else throw ConfigError("--ordering must be natural or sorted");
  cfg.early_abandon = a.early_abandon;
  cfg.threads = a.c.threads;
  const std::size_t largest = cfg.sizes.empty() ? 0 : cfg.sizes.back();

  std::vector<TimeSeries> pool, queries;
  std::optional<Generator> generator;
  if (a.data.empty()) {
    generator = parse_generator(a.generator);
    const auto db = z_normalize(gen_iid(*generator, largest, a.length, derive_seed(seed, 1)));
    const auto qs = z_normalize(gen_iid(*generator, a.queries, a.length, derive_seed(seed, 2)));
    for (const auto& item : db.items()) pool.push_back(item.series);
    for (const auto& item : qs.items()) queries.push_back(item.series);
  } else {
    const auto dataset = z_normalize(load_dataset(a.data));
    std::vector<std::size_t> order(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(derive_seed(seed, 3));
    shuffle(order, rng);
    if (dataset.size() < a.queries + largest) {
      throw SizeError("dataset has " + std::to_string(dataset.size()) + " items; need " +
                      std::to_string(a.queries + largest) + " (queries + largest size)");
    }
    for (std::size_t i = 0; i < a.queries; ++i) queries.push_back(dataset.items()[order[i]].series);
    for (std::size_t i = a.queries; i < a.queries + largest; ++i) pool.push_back(dataset.items()[order[i]].series);
  }
  const std::size_t n = queries.front().size();
  cfg.window = round_half_up(a.delta * static_cast<double>(n));

  const auto rows = magic_experiment(pool, queries, cfg);
  std::ostringstream csv;
  write_csv(rows, csv, !a.no_timing);

  json extra{{"window", cfg.window}};
  if (a.tightness_samples > 0 && largest > 0) {
    std::size_t next = 0;
    auto source = [&](Rng& rng) -> TimeSeries {
      if (generator) return z_normalize(gen_labeled(*generator, 0, n, rng).series.values());
      return queries[next++ % queries.size()];
    };
    const auto t = tightness_T(source, std::span<const TimeSeries>(pool).first(largest), cfg.window,
                               a.tightness_samples, derive_seed(seed, 4));
    extra["tightness_T"] = t.mean;
    extra["tightness_samples"] = t.samples;
    console(a.c) << "tightness T (LB_Keogh / DTW, window " << cfg.window << "): " << format_shortest(t.mean) << " over "
                 << t.samples << " pairs\n";
  }
  emit(a.c, "scan", csv.str(), extra);
}

struct ConvergeArgs {
  Common c;
  std::string generator{"cbf"};
  std::vector<std::size_t> sizes{50, 100, 200, 400, 800, 1600, 3200, 6400};
  std::size_t test_size{1000};
  std::size_t length{128};
  std::vector<std::string> measures{"l2", "dtw_c:delta=0.1"};
};

void cmd_converge(const ConvergeArgs& a) {
  ConvergenceConfig cfg;
  cfg.seed = require_seed(a.c);
  cfg.train_sizes = a.sizes;
  cfg.test_size = a.test_size;
  cfg.length = a.length;
  cfg.threads = a.c.threads;
  cfg.measures = parse_list<MeasureSpec>(a.measures, &parse_measure_spec);
  if (a.test_size < 1) throw ConfigError("--test-size must be at least 1");
  for (auto s : a.sizes) {
    if (s < 1) throw ConfigError("training sizes must be at least 1");
  }
  const auto rows = convergence_experiment(parse_generator(a.generator), cfg);
  std::ostringstream csv;
  write_csv(rows, csv);
  emit(a.c, "converge", csv.str());
}

struct GenArgs {
  Common c;
  std::string generator{"cbf"};
  std::size_t count{100};
  std::size_t length{128};
};

void cmd_gen(const GenArgs& a) {
  const auto seed = require_seed(a.c);
  if (a.count < 1 || a.length < 1) throw ConfigError("--count and --length must be at least 1");
  const auto dataset = gen_dataset(parse_generator(a.generator), a.count, a.length, seed);
  write_text(a.c.out, serialize_ucr(dataset));
  if (!a.c.json_path.empty()) {
    json rows = json::array();
    for (const auto& item : dataset.items()) rows.push_back({{"label", item.label}, {"values", item.series.vector()}});
    write_text(a.c.json_path, json{{"command", "gen"}, {"rows", rows}}.dump(2) + "\n");
  }
}

struct GridArgs {
  Common c;
  std::string measure{"dtw_c"};
  std::string data;
  bool no_normalize{false};
};

void cmd_grid(const GridArgs& a) {
  auto dataset = load_dataset(a.data);
  if (!a.no_normalize) dataset = normalize_archive(dataset);
  const auto kind = parse_measure_kind(a.measure);
  const auto grid = parameter_grid(kind, compute_stats(dataset.items()), dataset.series_length());
  std::ostringstream csv;
  csv << "index,spec\n";
  for (std::size_t i = 0; i < grid.specs.size(); ++i) csv << i << ',' << csv_field(to_string(grid.specs[i])) << '\n';
  emit(a.c, "grid", csv.str(), json{{"measure", measure_name(kind)}, {"size", grid.specs.size()}});
  console(a.c) << measure_name(kind) << ": " << grid.specs.size() << " parameter settings\n";
}

int run(int argc, char** argv) {
  CLI::App app{"tsbench: time series representation and distance measure benchmark"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  ClassifyArgs classify;
  auto* c1 = app.add_subcommand("classify", "Cross-validated 1NN error of a measure on a labeled dataset");
  c1->add_option("--data", classify.data, "Labeled dataset (UCR format)")->required();
  c1->add_option("--measure", classify.measure, "Measure kind (tuned over its grid) or kind:key=value,... (fixed)");
  c1->add_option("--k", classify.k, "Number of stratified subsets");
  c1->add_flag("--conventional", classify.conventional, "Train on k-1 subsets and test on one");
  c1->add_flag("--no-normalize", classify.no_normalize, "Skip z-normalization of the input");
  add_common(c1, classify.c, true);

  TlbArgs tlb;
  auto* c2 = app.add_subcommand("tlb", "Tightness of the lower bound for every representation");
  c2->add_option("--source", tlb.source, "Synthetic source: random_walk, smooth, periodic, bursty, cbf, two_patterns");
  c2->add_option("--data", tlb.data, "Draw series from this dataset instead of --source");
  c2->add_option("--lengths", tlb.lengths, "Series lengths")->delimiter(',');
  c2->add_option("--ks", tlb.ks, "Coefficient budgets")->delimiter(',');
  c2->add_option("--trials", tlb.trials, "Pairs per cell");
  c2->add_option("--methods", tlb.methods, "Representations")->delimiter(',');
  add_common(c2, tlb.c, true);

  ScanArgs scan;
  auto* c3 = app.add_subcommand("scan", "Lower-bounded DTW sequential scan with LB_Keogh and magic bounds");
  c3->add_option("--data", scan.data, "Dataset supplying queries and database (default: synthetic)");
  c3->add_option("--generator", scan.generator, "Synthetic generator when --data is absent");
  c3->add_option("--length", scan.length, "Synthetic series length");
  c3->add_option("--sizes", scan.sizes, "Database sizes")->delimiter(',');
  c3->add_option("--delta", scan.delta, "Warping window as a fraction of the length");
  c3->add_option("--bounds", scan.bounds, "Bounds: none, keogh, magic<f>")->delimiter(',');
  c3->add_option("--queries", scan.queries, "Number of queries");
  c3->add_option("--ordering", scan.ordering, "Candidate order: natural or sorted");
  c3->add_flag("--early-abandon", scan.early_abandon, "Abandon DTW once it exceeds the best so far");
  c3->add_flag("--no-timing", scan.no_timing, "Write 0 in the wall-time column (reproducible bytes)");
  c3->add_option("--tightness-samples", scan.tightness_samples, "Pairs used for the tightness estimate (0: skip)");
  add_common(c3, scan.c, true);

  ConvergeArgs converge;
  auto* c4 = app.add_subcommand("converge", "1NN error as a function of training set size");
  c4->add_option("--generator", converge.generator, "Labeled generator: cbf or two_patterns");
  c4->add_option("--sizes", converge.sizes, "Training set sizes")->delimiter(',');
  c4->add_option("--test-size", converge.test_size, "Test set size");
  c4->add_option("--length", converge.length, "Series length");
  c4->add_option("--measures", converge.measures, "Measure specs separated by ';'")->delimiter(';');
  add_common(c4, converge.c, true);

  GenArgs gen;
  auto* c5 = app.add_subcommand("gen", "Write a synthetic dataset in UCR format");
  c5->add_option("--generator", gen.generator, "cbf, two_patterns, random_walk, smooth, periodic, bursty");
  c5->add_option("--count", gen.count, "Series per class");
  c5->add_option("--length", gen.length, "Series length");
  add_common(c5, gen.c, true);

  GridArgs grid;
  auto* c6 = app.add_subcommand("grid", "Print the parameter grid searched for a measure");
  c6->add_option("--measure", grid.measure, "Measure kind");
  c6->add_option("--data", grid.data, "Dataset the grid is derived from")->required();
  c6->add_flag("--no-normalize", grid.no_normalize, "Skip z-normalization of the input");
  add_common(c6, grid.c, false);

  // Splice --config entries in right after the subcommand name.
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].starts_with("--config=")) path = args[i].substr(9);
    else continue;
    const auto extra = config_args(path, args);
    args.insert(args.begin() + (args.empty() ? 0 : 1), extra.begin(), extra.end());
    break;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  if (c1->parsed()) cmd_classify(classify);
  else if (c2->parsed()) cmd_tlb(tlb);
  else if (c3->parsed()) cmd_scan(scan);
  else if (c4->parsed()) cmd_converge(converge);
  else if (c5->parsed()) cmd_gen(gen);
  else if (c6->parsed()) cmd_grid(grid);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const tsbench::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const tsbench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
