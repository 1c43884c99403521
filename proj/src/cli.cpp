#include "cdr/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "cdr/assembler.hpp"
#include "cdr/characterization.hpp"
#include "cdr/config.hpp"
#include "cdr/error.hpp"
#include "cdr/features.hpp"
#include "cdr/ingestion.hpp"
#include "cdr/json_io.hpp"
#include "cdr/pca.hpp"
#include "cdr/report.hpp"
#include "cdr/synthgen.hpp"

namespace cdr {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string records;
  std::string towers;
  std::string config;
  std::string out_dir = ".";
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::string baseline_mode;
  bool no_timestamp = false;
  bool strict = false;
  bool dump_series = false;
  std::string anomalies;
  std::string characterization;
  std::string features;
  std::string cell;
};

/// Collects every output in memory, then writes them under temporary names and
/// renames them once all writes succeeded.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

  void commit() const {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
    std::vector<fs::path> written;
    auto cleanup = [&] {
      for (const auto& p : written) fs::remove(p, ec);
    };
    for (const auto& [name, content] : files_) {
      const fs::path tmp = dir_ / (name + ".tmp");
      std::ofstream out(tmp, std::ios::binary);
      out << content;
      out.close();
      if (!out) {
        cleanup();
        throw IoError("cannot write " + tmp.string());
      }
      written.push_back(tmp);
    }
    for (const auto& [name, content] : files_) {
      fs::rename(dir_ / (name + ".tmp"), dir_ / name, ec);
      if (ec) {
        cleanup();
        throw IoError("cannot rename output " + name + ": " + ec.message());
      }
    }
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::ifstream open_input(const std::string& path, const char* what) {
  if (path.empty()) throw Error(ErrorCategory::usage, std::string("missing --") + what);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

Json read_json(const std::string& path, const char* what) {
  auto in = open_input(path, what);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string default_path(const Options& o, const std::string& given, const char* name) {
  return given.empty() ? (fs::path(o.out_dir) / name).string() : given;
}

Settings load_settings(const Options& o, KeyValueConfig* raw = nullptr) {
  KeyValueConfig kv = o.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(o.config);
  if (!o.baseline_mode.empty()) kv.set("baseline_mode", o.baseline_mode);
  if (o.strict) kv.set("strict", "true");
  if (raw) *raw = kv;
  return Settings::from(kv);
}

struct Inputs {
  std::vector<CallRecord> records;
  TowerMap towers;
  std::size_t issues = 0;
};

Inputs load_inputs(const Options& o, const Settings& s, std::ostream& err) {
  Inputs in;
  {
    auto f = open_input(o.towers, "towers");
    in.towers = parse_towers(f);
  }
  auto f = open_input(o.records, "records");
  auto parsed = parse_records(f, s.strict);
  for (const auto& issue : parsed.issues) {
    err << "warning: " << o.records << " line " << issue.line << ": " << issue.message << "\n";
  }
  in.records = std::move(parsed.records);
  in.issues = parsed.issues.size();
  return in;
}

TimeGrid make_grid(const Settings& s, const std::vector<CallRecord>& records) {
  const seconds width{static_cast<long>(std::llround(s.bin_width_min * 60.0))};
  const minutes offset{s.utc_offset_min};
  if (s.origin) {
    const Timestamp origin = parse_timestamp(*s.origin);
    int weeks = s.weeks;
    if (weeks == 0) {
      if (records.empty()) throw ConfigError("cannot infer weeks without records");
      Timestamp last = records.front().timestamp;
      for (const auto& r : records) last = std::max(last, r.timestamp);
      weeks = static_cast<int>((last - origin) / kWeek) + 1;
    }
    return TimeGrid(origin, weeks, width, offset, s.week_start);
  }
  if (records.empty()) throw ConfigError("cannot infer the time grid without records; set origin and weeks");
  auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                      [](const CallRecord& a, const CallRecord& b) { return a.timestamp < b.timestamp; });
  TimeGrid grid = TimeGrid::covering(lo->timestamp, hi->timestamp, width, offset, s.week_start);
  if (s.weeks > 0) {
    if (s.weeks < grid.weeks()) throw RangeError("records extend beyond the configured number of weeks");
    grid = TimeGrid(grid.origin(), s.weeks, width, offset, s.week_start);
  }
  return grid;
}

std::string csv_header_comment(const Json& meta) {
  std::string line = "# " + meta.at("tool").get<std::string>() + " " + meta.at("version").get<std::string>();
  for (const auto& [k, v] : meta.at("config").items()) line += " " + k + "=" + v.get<std::string>();
  if (meta.contains("generated_at")) line += " generated_at=" + meta.at("generated_at").get<std::string>();
  return line + "\n";
}

// ---- subcommands ---------------------------------------------------------

void cmd_synth(const Options& o, OutputSet& outputs) {
  KeyValueConfig kv = o.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(o.config);
  (void)Settings::from(kv);  // reject bad pipeline keys in a shared config file
  SynthConfig cfg = synth_config_from(kv);
  if (o.seed) cfg.seed = *o.seed;
  const SynthDataset ds = generate(cfg);

  std::ostringstream records, towers;
  write_records(records, ds.records, cfg.utc_offset);
  write_towers(towers, ds.towers);
  std::vector<std::pair<std::string, std::string>> echo;
  for (const auto& [k, v] : kv.entries()) {
    if (k.rfind("synth.", 0) == 0) echo.emplace_back(k, v);
  }
  echo.emplace_back("synth.seed", std::to_string(cfg.seed));
  Json manifest = to_json(ds.truth);
  manifest["metadata"] = metadata(echo, !o.no_timestamp);
  outputs.add("records.csv", records.str());
  outputs.add("towers.csv", towers.str());
  outputs.add("manifest.json", dump(manifest));
}

struct Detection {
  Settings settings;
  Inputs inputs;
  LocationSeriesSet all;
  std::vector<Anomaly> anomalies;
};

Detection detect(const Options& o, std::ostream& err) {
  Settings settings = load_settings(o);
  Inputs inputs = load_inputs(o, settings, err);
  const TimeGrid grid = make_grid(settings, inputs.records);
  auto all = build_series(inputs.records, inputs.towers, grid, settings.cell_size, o.jobs);
  auto anomalies = detect_all(filter_active(all, settings.min_rate), settings.detector, o.jobs);
  return {std::move(settings), std::move(inputs), std::move(all), std::move(anomalies)};
}

Json anomalies_document(const Detection& d, const Options& o) {
  Json list = Json::array();
  for (const auto& a : d.anomalies) list.push_back(to_json(a, d.all.grid));
  Json doc{{"metadata", metadata(d.settings.effective(), !o.no_timestamp)},
           {"time_grid", to_json(d.all.grid)},
           {"cell_size", d.settings.cell_size},
           {"locations", d.all.cells.size()},
           {"active_locations", filter_active(d.all, d.settings.min_rate).cells.size()},
           {"parse_issues", d.inputs.issues},
           {"anomalies", std::move(list)}};
  return doc;
}

void cmd_detect(const Options& o, OutputSet& outputs, std::ostream& out, std::ostream& err) {
  const Detection d = detect(o, err);
  outputs.add("anomalies.json", dump(anomalies_document(d, o)));
  if (o.dump_series) {
    Json series = to_json(d.all);
    series["metadata"] = metadata(d.settings.effective(), !o.no_timestamp);
    outputs.add("series.json", dump(series));
  }
  out << d.anomalies.size() << " anomalies in " << d.all.cells.size() << " locations\n";
}

struct LoadedAnomalies {
  TimeGrid grid;
  double cell_size;
  std::vector<Anomaly> anomalies;
};

LoadedAnomalies load_anomalies(const std::string& path) {
  const Json doc = read_json(path, "anomalies");
  try {
    LoadedAnomalies l{time_grid_from_json(doc.at("time_grid")), doc.value("cell_size", 1.0), {}};
    for (const auto& a : doc.at("anomalies")) l.anomalies.push_back(anomaly_from_json(a, l.grid));
    return l;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

Json characterize_into(const Options& o, const Settings& s, const Inputs& inputs,
                       const LoadedAnomalies& loaded, OutputSet& outputs) {
  const auto all = build_series(inputs.records, inputs.towers, loaded.grid, s.cell_size, o.jobs);
  const RecordIndex index(inputs.records, inputs.towers, loaded.grid, s.cell_size);
  const auto reports = characterize_all(loaded.anomalies, all, index, s.characterization, o.jobs);

  Json list = Json::array();
  const Json meta = metadata(s.effective(), !o.no_timestamp);
  std::ostringstream rings, layers;
  rings << csv_header_comment(meta) << "anomaly,ring,cells,mean_distance_km,mean_delta,total_delta\n";
  layers << csv_header_comment(meta) << "anomaly,layer,offset,bin,calls,baseline_calls\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& a = loaded.anomalies[i];
    const auto& r = reports[i];
    list.push_back(to_json(a, r, FeatureVector::from(a, r, loaded.grid), loaded.grid));
    for (const auto& ring : r.spatial.rings) {
      rings << i << ',' << ring.index << ',' << ring.cells << ',' << format_number(ring.mean_distance)
            << ',' << format_number(ring.mean_delta) << ',' << format_number(ring.total_delta) << '\n';
    }
    for (const auto& layer : r.layers) {
      for (std::size_t t = 0; t < layer.series.size(); ++t) {
        layers << i << ',' << layer.index << ',' << t << ',' << a.run.t_start + static_cast<int>(t) << ','
               << format_number(layer.series[t]) << ',' << format_number(layer.baseline_series[t]) << '\n';
      }
    }
  }
  Json doc{{"metadata", meta},
           {"time_grid", to_json(loaded.grid)},
           {"cell_size", s.cell_size},
           {"anomalies", std::move(list)}};
  outputs.add("characterization.json", dump(doc));
  outputs.add("rings.csv", rings.str());
  outputs.add("layers.csv", layers.str());
  return doc;
}

void cmd_characterize(const Options& o, OutputSet& outputs, std::ostream& err) {
  const Settings s = load_settings(o);
  const Inputs inputs = load_inputs(o, s, err);
  characterize_into(o, s, inputs, load_anomalies(default_path(o, o.anomalies, "anomalies.json")), outputs);
}

std::string features_csv(const Json& characterization, const Json& meta) {
  std::vector<FeatureVector> vectors;
  std::vector<const Json*> entries;
  for (const auto& a : characterization.at("anomalies")) {
    FeatureVector f;
    const auto& fj = a.at("features");
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      f.values[k] = number_or_nan(fj.at(std::string(kFeatureNames[k])));
    }
    vectors.push_back(f);
    entries.push_back(&a);
  }
  const FeatureMatrix m = impute_median(vectors);
  std::ostringstream out;
  out << csv_header_comment(meta) << "anomaly,cell_ix,cell_iy,t_start";
  for (auto name : kFeatureNames) out << ',' << name;
  out << ",imputed\n";
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    const Json& a = *entries[i];
    out << i << ',' << a.at("cell").at("ix").get<int>() << ',' << a.at("cell").at("iy").get<int>() << ','
        << a.at("t_start").get<int>();
    for (double v : m.rows[i]) out << ',' << format_number(v);
    out << ',';
    for (bool b : m.imputed[i]) out << (b ? '1' : '0');
    out << '\n';
  }
  return out.str();
}

void cmd_features(const Options& o, OutputSet& outputs) {
  const Settings s = load_settings(o);
  const Json doc = read_json(default_path(o, o.characterization, "characterization.json"), "characterization");
  outputs.add("features.csv", features_csv(doc, metadata(s.effective(), !o.no_timestamp)));
}

struct FeatureTable {
  std::vector<std::string> ids;  // anomaly,cell_ix,cell_iy,t_start
  std::vector<std::vector<double>> rows;
};

FeatureTable parse_features(std::istream& in) {
  FeatureTable t;
  std::string line;
  std::vector<std::string> header;
  auto split = [](const std::string& s) {
    std::vector<std::string> f;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    return f;
  };
  std::vector<std::size_t> cols;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto f = split(line);
    if (header.empty()) {
      header = f;
      for (auto name : kFeatureNames) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ParseError("features file lacks column " + std::string(name));
        cols.push_back(static_cast<std::size_t>(it - header.begin()));
      }
      continue;
    }
    if (f.size() != header.size()) throw ParseError("features line " + std::to_string(line_no) + ": wrong field count");
    std::vector<double> row;
    for (auto c : cols) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(f[c], &used));
        if (used != f[c].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError("features line " + std::to_string(line_no) + ": bad number '" + f[c] + "'");
      }
    }
    std::string id;
    for (std::size_t k = 0; k < std::min<std::size_t>(4, f.size()); ++k) id += (k ? "," : "") + f[k];
    t.ids.push_back(id);
    t.rows.push_back(std::move(row));
  }
  if (header.empty()) throw ParseError("features file has no header");
  return t;
}

void pca_into(const FeatureTable& table, const Json& meta, OutputSet& outputs, std::ostream& err) {
  const PcaResult r = pca(table.rows);
  std::vector<std::string> names(kFeatureNames.begin(), kFeatureNames.end());
  for (auto c : r.dropped) err << "warning: dropped zero-variance feature " << names[c] << "\n";
  Json doc = to_json(r, names);
  doc["metadata"] = meta;
  std::ostringstream proj;
  proj << csv_header_comment(meta) << "anomaly,cell_ix,cell_iy,t_start";
  for (std::size_t k = 0; k < r.components.size(); ++k) proj << ",pc" << k + 1;
  proj << '\n';
  for (std::size_t i = 0; i < r.projections.size(); ++i) {
    proj << table.ids[i];
    for (double v : r.projections[i]) proj << ',' << format_number(v);
    proj << '\n';
  }
  outputs.add("pca.json", dump(doc));
  outputs.add("projections.csv", proj.str());
}

void cmd_pca(const Options& o, OutputSet& outputs, std::ostream& err) {
  const Settings s = load_settings(o);
  auto in = open_input(default_path(o, o.features, "features.csv"), "features");
  pca_into(parse_features(in), metadata(s.effective(), !o.no_timestamp), outputs, err);
}

void report_into(const Options& o, const Settings& s, const Json& anomalies_doc,
                 const Json* characterization, OutputSet& outputs) {
  const TimeGrid grid = time_grid_from_json(anomalies_doc.at("time_grid"));
  std::map<std::tuple<int, int, int>, double> r_c_of;
  if (characterization) {
    for (const auto& a : characterization->at("anomalies")) {
      if (a.at("r_c_km").is_null()) continue;
      r_c_of[{a.at("cell").at("ix").get<int>(), a.at("cell").at("iy").get<int>(), a.at("t_start").get<int>()}] =
          a.at("r_c_km").get<double>();
    }
  }
  std::vector<AnomalyDigest> digests;
  for (const auto& j : anomalies_doc.at("anomalies")) {
    const Anomaly a = anomaly_from_json(j, grid);
    AnomalyDigest d;
    d.cell = a.run.cell;
    d.epicenter = a.epicenter;
    d.t_start = a.run.t_start;
    d.t_stop = a.run.t_stop;
    d.duration_min = j.contains("duration_min") ? j.at("duration_min").get<double>()
                                                : a.duration_bins * grid.bin_minutes();
    d.start_hour = grid.hour_of_day(a.run.t_start);
    d.start_day = grid.day_of_week(a.run.t_start);
    if (auto it = r_c_of.find({d.cell.ix, d.cell.iy, d.t_start}); it != r_c_of.end()) d.r_c = it->second;
    digests.push_back(d);
  }
  ReportOptions ro;
  ro.span_days = grid.span_minutes() / (24.0 * 60.0);
  ro.dedup_radius_km = s.spatial_dedup_radius;
  const ReportStats st = summarize(digests, ro);

  const Json meta = metadata(s.effective(), !o.no_timestamp);
  const std::string head = csv_header_comment(meta);
  std::ostringstream summary;
  summary << head << "metric,value\n"
          << "anomalies," << st.count << '\n'
          << "span_days," << format_number(ro.span_days) << '\n'
          << "anomalies_per_day," << format_number(st.per_day) << '\n'
          << "mean_duration_min," << format_number(st.mean_duration_min) << '\n'
          << "median_duration_min," << format_number(st.median_duration_min) << '\n'
          << "anomalies_with_r_c," << st.with_r_c << '\n'
          << "mean_r_c_km," << (st.mean_r_c ? format_number(*st.mean_r_c) : "") << '\n'
          << "evening_start_fraction," << format_number(st.evening_fraction) << '\n'
          << "spatial_clusters," << st.clusters << '\n';
  auto hist = [&](const std::vector<HistogramBin>& bins, const char* unit) {
    std::ostringstream h;
    h << head << "lower_" << unit << ",upper_" << unit << ",count\n";
    for (const auto& b : bins) h << format_number(b.lower) << ',' << format_number(b.upper) << ',' << b.count << '\n';
    return h.str();
  };
  outputs.add("report_summary.csv", summary.str());
  outputs.add("report_duration_hist.csv", hist(st.duration_hist, "min"));
  outputs.add("report_rc_hist.csv", hist(st.r_c_hist, "km"));
  outputs.add("report_start_hour_hist.csv", hist(st.start_hour_hist, "hour"));
  outputs.add("report_start_day_hist.csv", hist(st.start_day_hist, "day"));
}

void cmd_report(const Options& o, OutputSet& outputs) {
  const Settings s = load_settings(o);
  const Json doc = read_json(default_path(o, o.anomalies, "anomalies.json"), "anomalies");
  std::optional<Json> ch;
  const std::string ch_path = default_path(o, o.characterization, "characterization.json");
  if (!o.characterization.empty() || fs::exists(ch_path)) ch = read_json(ch_path, "characterization");
  try {
    report_into(o, s, doc, ch ? &*ch : nullptr, outputs);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report input: ") + e.what());
  }
}

void cmd_pipeline(const Options& o, OutputSet& outputs, std::ostream& out, std::ostream& err) {
  const Detection d = detect(o, err);
  const Json anomalies_doc = anomalies_document(d, o);
  outputs.add("anomalies.json", dump(anomalies_doc));
  const LoadedAnomalies loaded{d.all.grid, d.settings.cell_size, d.anomalies};

  const Json ch = characterize_into(o, d.settings, d.inputs, loaded, outputs);
  const Json meta = metadata(d.settings.effective(), !o.no_timestamp);
  const std::string features = features_csv(ch, meta);
  outputs.add("features.csv", features);
  if (d.anomalies.size() >= 2) {
    std::istringstream fin(features);
    pca_into(parse_features(fin), meta, outputs, err);
  } else {
    err << "note: fewer than two anomalies, skipping pca\n";
  }
  report_into(o, d.settings, anomalies_doc, &ch, outputs);
  out << d.anomalies.size() << " anomalies in " << d.all.cells.size() << " locations\n";
}

void cmd_plot_data(const Options& o, OutputSet& outputs, std::ostream& err) {
  const Settings s = load_settings(o);
  const Inputs inputs = load_inputs(o, s, err);
  const TimeGrid grid = make_grid(s, inputs.records);
  const auto set = build_series(inputs.records, inputs.towers, grid, s.cell_size, o.jobs);
  int ix = 0, iy = 0;
  char comma = 0;
  std::istringstream cs(o.cell);
  if (!(cs >> ix >> comma >> iy) || comma != ',') throw Error(ErrorCategory::usage, "--cell expects ix,iy");
  const LocationSeries* series = set.find({ix, iy});
  if (!series) throw DataError("no towers in cell " + o.cell);
  const auto volume = series->as_real();
  const std::string tag = std::to_string(ix) + "_" + std::to_string(iy);
  const Json meta = metadata(s.effective(), !o.no_timestamp);
  for (int lag : {1, grid.bins_per_week()}) {
    Json h = to_json(build_recurrence_hist(volume, lag, s.detector.recurrence.phase_bin_width));
    h["metadata"] = meta;
    outputs.add("recurrence_" + tag + "_tau" + std::to_string(lag) + ".json", dump(h));
  }
  const LocationDetection det = detect_location(*series, grid, s.detector);
  std::vector<char> var_flag(volume.size(), 0);
  for (const auto& r : det.variance_runs) {
    for (int t : r.flagged_variance) var_flag[static_cast<std::size_t>(t)] = 1;
  }
  std::ostringstream z;
  z << csv_header_comment(meta) << "bin,volume,z,variance_flag,recurrence_flag\n";
  for (std::size_t t = 0; t < volume.size(); ++t) {
    z << t << ',' << series->volume[t] << ',' << (det.z.defined(t) ? format_number(det.z.z[t]) : "") << ','
      << int(var_flag[t]) << ',' << int(det.suspicious.contains(static_cast<int>(t))) << '\n';
  }
  outputs.add("zscore_" + tag + ".csv", z.str());
}

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::usage: return 2;
    case ErrorCategory::config: return 3;
    case ErrorCategory::parse: return 4;
    case ErrorCategory::range: return 5;
    case ErrorCategory::data: return 6;
    case ErrorCategory::io: return 7;
  }
  return 1;
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Detect and characterise anomalous activity in gridded call records", "cdr-anomaly"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "key = value settings file");
    sub->add_option("--out-dir", o.out_dir, "output directory");
    sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--no-timestamp", o.no_timestamp, "omit generated_at from output metadata");
  };
  auto add_inputs = [&](CLI::App* sub) {
    sub->add_option("--records", o.records, "records CSV")->required();
    sub->add_option("--towers", o.towers, "towers CSV")->required();
    sub->add_option("--baseline-mode", o.baseline_mode, "weekly-mean or prior-week")
        ->check(CLI::IsMember({"weekly-mean", "prior-week"}));
    sub->add_flag("--strict", o.strict, "abort on the first malformed record");
  };

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset with planted anomalies");
  add_common(synth);
  synth->add_option("--seed", o.seed, "random seed (overrides synth.seed)");

  auto* detect_cmd = app.add_subcommand("detect", "flag anomalies in every active location");
  add_common(detect_cmd);
  add_inputs(detect_cmd);
  detect_cmd->add_flag("--dump-series", o.dump_series, "also write series.json");

  auto* characterize_cmd = app.add_subcommand("characterize", "temporal, spatial and social measures");
  add_common(characterize_cmd);
  add_inputs(characterize_cmd);
  characterize_cmd->add_option("--anomalies", o.anomalies, "anomalies JSON (default OUT/anomalies.json)");

  auto* features_cmd = app.add_subcommand("features", "nine-feature matrix with median imputation");
  add_common(features_cmd);
  features_cmd->add_option("--characterization", o.characterization, "default OUT/characterization.json");

  auto* pca_cmd = app.add_subcommand("pca", "principal components of the feature matrix");
  add_common(pca_cmd);
  pca_cmd->add_option("--features", o.features, "default OUT/features.csv");

  auto* report_cmd = app.add_subcommand("report", "summary statistics and histograms");
  add_common(report_cmd);
  report_cmd->add_option("--anomalies", o.anomalies, "default OUT/anomalies.json");
  report_cmd->add_option("--characterization", o.characterization, "default OUT/characterization.json if present");

  auto* pipeline_cmd = app.add_subcommand("pipeline", "detect, characterize, features, pca and report");
  add_common(pipeline_cmd);
  add_inputs(pipeline_cmd);

  auto* plot_cmd = app.add_subcommand("plot-data", "recurrence histograms and z-scores of one cell");
  add_common(plot_cmd);
  add_inputs(plot_cmd);
  plot_cmd->add_option("--cell", o.cell, "ix,iy")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << "\n";
    return exit_code(ErrorCategory::usage);
  }

  try {
    OutputSet outputs{o.out_dir};
    if (synth->parsed()) cmd_synth(o, outputs);
    if (detect_cmd->parsed()) cmd_detect(o, outputs, out, err);
    if (characterize_cmd->parsed()) cmd_characterize(o, outputs, err);
    if (features_cmd->parsed()) cmd_features(o, outputs);
    if (pca_cmd->parsed()) cmd_pca(o, outputs, err);
    if (report_cmd->parsed()) cmd_report(o, outputs);
    if (pipeline_cmd->parsed()) cmd_pipeline(o, outputs, out, err);
    if (plot_cmd->parsed()) cmd_plot_data(o, outputs, err);
    outputs.commit();
  } catch (const Error& e) {
    err << "error: " << to_string(e.category()) << ": " << one_line(e.what()) << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace cdr
