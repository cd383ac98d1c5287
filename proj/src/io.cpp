#include "dfpred/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dfpred/version.hpp"

namespace dfpred {

namespace nc = counters;
using ordered_json = nlohmann::ordered_json;

std::string format_double(double value) {
  std::array<char, 32> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return {buf.data(), ptr};
}

double parse_double(std::string_view text) {
  double out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw DataError("malformed number: " + std::string(text));
  return out;
}

namespace {

std::int64_t parse_int(std::string_view text) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw DataError("malformed integer: " + std::string(text));
  return out;
}

std::uint64_t parse_uint(std::string_view text) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw DataError("malformed unsigned integer: " + std::string(text));
  return out;
}

// Buffered line writer around std::FILE.
class FileWriter {
 public:
  explicit FileWriter(const std::filesystem::path& path)
      : path_(path), file_(std::fopen(path.c_str(), "wb")) {
    if (!file_) throw DataError("cannot open for writing: " + path.string());
    buffer_.reserve(1 << 20);
  }
  ~FileWriter() {
    if (file_) {
      flush();
      std::fclose(file_);
    }
  }
  FileWriter(const FileWriter&) = delete;
  FileWriter& operator=(const FileWriter&) = delete;

  void put(std::string_view s) {
    buffer_.append(s);
    if (buffer_.size() > (1 << 20) - 4096) flush();
  }
  void put(char c) { buffer_.push_back(c); }
  void put_uint(std::uint64_t v) {
    std::array<char, 24> tmp;
    auto [ptr, ec] = std::to_chars(tmp.data(), tmp.data() + tmp.size(), v);
    buffer_.append(tmp.data(), ptr);
  }
  void put_int(std::int64_t v) {
    std::array<char, 24> tmp;
    auto [ptr, ec] = std::to_chars(tmp.data(), tmp.data() + tmp.size(), v);
    buffer_.append(tmp.data(), ptr);
  }
  void put_double(double v) { put(format_double(v)); }

  void flush() {
    if (!buffer_.empty()) {
      if (std::fwrite(buffer_.data(), 1, buffer_.size(), file_) != buffer_.size())
        throw DataError("write failed: " + path_.string());
      buffer_.clear();
    }
  }

 private:
  std::filesystem::path path_;
  std::FILE* file_;
  std::string buffer_;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Iterates lines of a CSV body, validating the header, and splits fields.
class CsvReader {
 public:
  CsvReader(const std::filesystem::path& path, std::string_view expected_header)
      : path_(path.string()), text_(read_file(path)) {
    std::string_view header = next_line();
    if (header != expected_header)
      throw DataError(path_ + ": expected header '" + std::string(expected_header) + "', got '" +
                      std::string(header) + "'");
  }

  /// Next data line split on commas into `fields`; false at end of file.
  bool next_row(std::vector<std::string_view>& fields, std::size_t expected_fields) {
    while (pos_ < text_.size()) {
      std::string_view line = next_line();
      if (line.empty()) continue;
      fields.clear();
      std::size_t start = 0;
      while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
          fields.push_back(line.substr(start));
          break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
      }
      if (fields.size() != expected_fields)
        throw DataError(path_ + ":" + std::to_string(line_no_) + ": expected " +
                        std::to_string(expected_fields) + " fields, got " +
                        std::to_string(fields.size()));
      return true;
    }
    return false;
  }

  const std::string& path() const { return path_; }
  std::size_t line() const { return line_no_; }

 private:
  std::string_view next_line() {
    const std::size_t eol = text_.find('\n', pos_);
    std::string_view line =
        std::string_view(text_).substr(pos_, eol == std::string::npos ? text_.size() - pos_
                                                                      : eol - pos_);
    pos_ = eol == std::string::npos ? text_.size() : eol + 1;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  }

  std::string path_;
  std::string text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

void check_known_fields(const ordered_json& obj, std::initializer_list<std::string_view> allowed,
                        const std::string& context) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (std::string_view a : allowed)
      if (key == a) known = true;
    if (!known) throw DataError(context + ": unknown field '" + key + "'");
  }
}

}  // namespace

std::string file_hash(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(h));
  return buf.data();
}

void save_topology(const MachineSpec& spec, const std::filesystem::path& path) {
  ordered_json j;
  j["routers_per_group"] = spec.routers_per_group;
  j["nodes_per_router"] = spec.nodes_per_router;
  j["groups"] = spec.groups;
  j["routers"] = ordered_json::array();
  for (const Router& r : spec.routers) {
    ordered_json rj;
    rj["id"] = r.id;
    rj["group"] = r.group;
    rj["row"] = r.row;
    rj["col"] = r.col;
    rj["kind"] = std::string(to_string(r.kind));
    std::vector<std::string> tiles;
    tiles.reserve(kTilesPerRouter);
    for (TileClass c : r.tiles) tiles.emplace_back(to_string(c));
    rj["tiles"] = tiles;
    j["routers"].push_back(std::move(rj));
  }
  j["nodes"] = ordered_json::array();
  for (const auto& [node, router] : spec.nodes) {
    ordered_json nj;
    nj["id"] = node;
    nj["router"] = router;
    j["nodes"].push_back(std::move(nj));
  }
  FileWriter out(path);
  out.put(j.dump(2));
  out.put('\n');
}

Machine load_topology(const std::filesystem::path& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": invalid JSON: " + e.what());
  }
  const std::string context = path.string();
  check_known_fields(j, {"groups", "routers", "nodes", "routers_per_group", "nodes_per_router"},
                     context);
  MachineSpec spec;
  try {
    spec.routers_per_group = j.value("routers_per_group", 96);
    spec.nodes_per_router = j.value("nodes_per_router", 4);
    spec.groups = j.at("groups").get<std::vector<std::string>>();
    for (const auto& rj : j.at("routers")) {
      check_known_fields(rj, {"id", "group", "row", "col", "kind", "tiles"}, context + ": router");
      Router r;
      r.id = rj.at("id").get<std::string>();
      r.group = rj.at("group").get<std::string>();
      r.row = rj.value("row", 0);
      r.col = rj.value("col", 0);
      r.kind = router_kind_from_string(rj.at("kind").get<std::string>());
      const auto tiles = rj.at("tiles").get<std::vector<std::string>>();
      if (tiles.size() != kTilesPerRouter)
        throw DataError(context + ": router " + r.id + " must list exactly 48 tile classes");
      for (std::size_t i = 0; i < tiles.size(); ++i)
        r.tiles[i] = tile_class_from_string(tiles[i]);
      spec.routers.push_back(std::move(r));
    }
    for (const auto& nj : j.at("nodes")) {
      check_known_fields(nj, {"id", "router"}, context + ": node");
      spec.nodes.emplace_back(nj.at("id").get<std::string>(), nj.at("router").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(context + ": " + e.what());
  }
  return Machine::build(spec);
}

namespace {
constexpr std::string_view kStreamHeader = "timestamp,router_id,tile_index,counter_name,value";
}

void write_counter_stream(const SynthDataset& ds, const std::filesystem::path& path) {
  FileWriter out(path);
  out.put(kStreamHeader);
  out.put('\n');
  const auto& routers = ds.machine.routers();
  const auto& names = nc::raw_names();
  for (const auto& s : ds.stream) {
    out.put_int(s.t);
    out.put(',');
    out.put(routers[s.router].id);
    out.put(',');
    out.put_int(s.tile);
    out.put(',');
    out.put(names[s.counter]);
    out.put(',');
    out.put_uint(s.v);
    out.put('\n');
  }
}

void write_counter_stream(std::span<const CounterSample> samples,
                          const std::filesystem::path& path) {
  FileWriter out(path);
  out.put(kStreamHeader);
  out.put('\n');
  for (const CounterSample& s : samples) {
    out.put_int(s.timestamp);
    out.put(',');
    out.put(s.router_id);
    out.put(',');
    out.put_int(s.tile_index);
    out.put(',');
    out.put(s.counter_name);
    out.put(',');
    out.put_uint(s.value);
    out.put('\n');
  }
}

std::vector<CounterSample> read_counter_stream(const std::filesystem::path& path) {
  CsvReader reader(path, kStreamHeader);
  std::vector<CounterSample> samples;
  std::vector<std::string_view> f;
  while (reader.next_row(f, 5)) {
    CounterSample s;
    s.timestamp = parse_int(f[0]);
    s.router_id = std::string(f[1]);
    s.tile_index = static_cast<int>(parse_int(f[2]));
    s.counter_name = std::string(f[3]);
    s.value = parse_uint(f[4]);
    samples.push_back(std::move(s));
  }
  return samples;
}

CounterStream load_counter_stream(const std::filesystem::path& path, const Machine& m) {
  CsvReader reader(path, kStreamHeader);
  std::vector<CounterStream::CompactSample> samples;
  std::vector<std::string_view> f;
  while (reader.next_row(f, 5)) {
    CounterStream::CompactSample s;
    s.t = parse_int(f[0]);
    s.router = static_cast<std::int32_t>(m.router_index(f[1]));
    s.tile = static_cast<std::int16_t>(parse_int(f[2]));
    const int counter = nc::raw_index(f[3]);
    if (counter < 0)
      throw DataError(reader.path() + ":" + std::to_string(reader.line()) +
                      ": unknown counter name: " + std::string(f[3]));
    s.counter = static_cast<std::int16_t>(counter);
    s.v = parse_uint(f[4]);
    samples.push_back(s);
  }
  return CounterStream::index_compact(std::move(samples), m);
}

namespace {
constexpr std::string_view kJobsHeader = "job_id,app,node_count,start_time,exec_time,nodes";
}

void write_jobs(std::span<const JobRecord> jobs, const std::filesystem::path& path) {
  FileWriter out(path);
  out.put(kJobsHeader);
  out.put('\n');
  for (const JobRecord& j : jobs) {
    out.put(j.job_id);
    out.put(',');
    out.put(j.app);
    out.put(',');
    out.put_int(j.node_count);
    out.put(',');
    out.put_int(j.start_time);
    out.put(',');
    out.put_double(j.exec_time);
    out.put(',');
    for (std::size_t i = 0; i < j.nodes.size(); ++i) {
      if (i) out.put(';');
      out.put(j.nodes[i]);
    }
    out.put('\n');
  }
}

std::vector<JobRecord> read_jobs(const std::filesystem::path& path) {
  CsvReader reader(path, kJobsHeader);
  std::vector<JobRecord> jobs;
  std::vector<std::string_view> f;
  while (reader.next_row(f, 6)) {
    JobRecord j;
    j.job_id = std::string(f[0]);
    j.app = std::string(f[1]);
    j.node_count = static_cast<int>(parse_int(f[2]));
    j.start_time = parse_int(f[3]);
    j.exec_time = parse_double(f[4]);
    std::string_view nodes = f[5];
    std::size_t start = 0;
    while (start <= nodes.size() && !nodes.empty()) {
      const std::size_t semi = nodes.find(';', start);
      if (semi == std::string_view::npos) {
        j.nodes.emplace_back(nodes.substr(start));
        break;
      }
      j.nodes.emplace_back(nodes.substr(start, semi - start));
      start = semi + 1;
    }
    j.validate();
    jobs.push_back(std::move(j));
  }
  return jobs;
}

namespace {
constexpr std::string_view kTruthHeader =
    "job_id,c_gbl,c_grp,num_groups,noiseless_runtime,runtime";
}

void write_ground_truth(std::span<const GroundTruthRow> rows, const std::filesystem::path& path) {
  FileWriter out(path);
  out.put(kTruthHeader);
  out.put('\n');
  for (const GroundTruthRow& r : rows) {
    out.put(r.job_id);
    out.put(',');
    out.put_double(r.c_gbl);
    out.put(',');
    out.put_double(r.c_grp);
    out.put(',');
    out.put_int(r.num_groups);
    out.put(',');
    out.put_double(r.noiseless_runtime);
    out.put(',');
    out.put_double(r.runtime);
    out.put('\n');
  }
}

std::vector<GroundTruthRow> read_ground_truth(const std::filesystem::path& path) {
  CsvReader reader(path, kTruthHeader);
  std::vector<GroundTruthRow> rows;
  std::vector<std::string_view> f;
  while (reader.next_row(f, 6)) {
    GroundTruthRow r;
    r.job_id = std::string(f[0]);
    r.c_gbl = parse_double(f[1]);
    r.c_grp = parse_double(f[2]);
    r.num_groups = parse_int(f[3]);
    r.noiseless_runtime = parse_double(f[4]);
    r.runtime = parse_double(f[5]);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

std::string windows_header(FeatureKind kind) {
  std::string h = "job_id,router_id";
  if (kind == FeatureKind::Raw) {
    for (const auto& name : nc::raw_names()) h += "," + name;
  } else {
    for (const auto& name : nc::derived_names()) h += "," + name;
  }
  return h;
}

}  // namespace

void write_windows(const ExtractionReport& report, const Machine& m, FeatureKind kind,
                   const std::filesystem::path& path) {
  FileWriter out(path);
  out.put(windows_header(kind));
  out.put('\n');
  for (const JobWindowFeatures& job : report.jobs) {
    const Matrix& values = kind == FeatureKind::Raw ? job.raw : job.derived;
    for (Index r = 0; r < values.rows(); ++r) {
      out.put(job.job_id);
      out.put(',');
      out.put(m.routers()[r].id);
      for (Index c = 0; c < values.cols(); ++c) {
        out.put(',');
        out.put_double(values(r, c));
      }
      out.put('\n');
    }
  }
}

ExtractionReport read_windows(const std::filesystem::path& raw_path,
                              const std::filesystem::path& derived_path, const Machine& m) {
  ExtractionReport report;
  auto load = [&](const std::filesystem::path& path, FeatureKind kind) {
    CsvReader reader(path, windows_header(kind));
    std::vector<std::string_view> f;
    const int n_counters = kind == FeatureKind::Raw ? nc::kRawCount : nc::kDerivedCount;
    while (reader.next_row(f, static_cast<std::size_t>(n_counters) + 2)) {
      const std::string job_id(f[0]);
      JobWindowFeatures* job = nullptr;
      if (!report.jobs.empty() && report.jobs.back().job_id == job_id) {
        job = &report.jobs.back();
      } else {
        for (auto& existing : report.jobs)
          if (existing.job_id == job_id) job = &existing;
        if (!job) {
          report.jobs.emplace_back();
          job = &report.jobs.back();
          job->job_id = job_id;
          job->raw.setZero(m.router_count(), nc::kRawCount);
          job->derived.setZero(m.router_count(), nc::kDerivedCount);
        }
      }
      const Index r = m.router_index(f[1]);
      Matrix& values = kind == FeatureKind::Raw ? job->raw : job->derived;
      for (int c = 0; c < n_counters; ++c) values(r, c) = parse_double(f[2 + c]);
    }
  };
  load(raw_path, FeatureKind::Raw);
  load(derived_path, FeatureKind::Derived);
  std::sort(report.jobs.begin(), report.jobs.end(),
            [](const JobWindowFeatures& a, const JobWindowFeatures& b) {
              return a.job_id < b.job_id;
            });
  return report;
}

namespace {
constexpr std::string_view kSkippedHeader = "job_id,reason";
}

void write_skipped(std::span<const ExtractionReport::Skip> skipped,
                   const std::filesystem::path& path) {
  FileWriter out(path);
  out.put(kSkippedHeader);
  out.put('\n');
  for (const auto& s : skipped) {
    out.put(s.job_id);
    out.put(',');
    // Reasons are free text; commas would break the two-field format.
    std::string reason = s.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    out.put(reason);
    out.put('\n');
  }
}

std::vector<ExtractionReport::Skip> read_skipped(const std::filesystem::path& path) {
  CsvReader reader(path, kSkippedHeader);
  std::vector<ExtractionReport::Skip> rows;
  std::vector<std::string_view> f;
  while (reader.next_row(f, 2)) rows.push_back({std::string(f[0]), std::string(f[1])});
  return rows;
}

void write_feature_matrix(const FeatureMatrix& fm, const std::filesystem::path& path) {
  fm.validate();
  FileWriter out(path);
  out.put("job_id,app");
  for (const std::string& name : fm.feature_names) {
    out.put(',');
    out.put(name);
  }
  out.put(",exec_time\n");
  for (Index i = 0; i < fm.rows(); ++i) {
    out.put(fm.job_ids[i]);
    out.put(',');
    out.put(fm.apps[i]);
    for (Index j = 0; j < fm.cols(); ++j) {
      out.put(',');
      out.put_double(fm.X(i, j));
    }
    out.put(',');
    out.put_double(fm.y[i]);
    out.put('\n');
  }
}

FeatureMatrix read_feature_matrix(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const std::size_t eol = text.find('\n');
  if (eol == std::string::npos) throw DataError(path.string() + ": empty file");
  std::string_view header = std::string_view(text).substr(0, eol);
  if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
  if (!header.starts_with("job_id,app,"))
    throw DataError(path.string() + ": feature matrix header must start with job_id,app");
  if (!header.ends_with(",exec_time"))
    throw DataError(path.string() + ": feature matrix header must end with exec_time");

  FeatureMatrix fm;
  {
    std::string_view names = header.substr(11, header.size() - 11 - 10);
    std::size_t start = 0;
    while (start <= names.size() && !names.empty()) {
      const std::size_t comma = names.find(',', start);
      if (comma == std::string_view::npos) {
        fm.feature_names.emplace_back(names.substr(start));
        break;
      }
      fm.feature_names.emplace_back(names.substr(start, comma - start));
      start = comma + 1;
    }
  }
  if (fm.feature_names.empty()) throw DataError(path.string() + ": no feature columns");

  CsvReader reader(path, header);
  std::vector<std::string_view> f;
  std::vector<std::vector<double>> rows;
  while (reader.next_row(f, fm.feature_names.size() + 3)) {
    fm.job_ids.emplace_back(f[0]);
    fm.apps.emplace_back(f[1]);
    std::vector<double> row(fm.feature_names.size() + 1);
    for (std::size_t j = 0; j < fm.feature_names.size() + 1; ++j) row[j] = parse_double(f[2 + j]);
    rows.push_back(std::move(row));
  }
  fm.X.resize(static_cast<Index>(rows.size()), static_cast<Index>(fm.feature_names.size()));
  fm.y.resize(static_cast<Index>(rows.size()));
  for (Index i = 0; i < fm.X.rows(); ++i) {
    for (Index j = 0; j < fm.X.cols(); ++j) fm.X(i, j) = rows[i][j];
    fm.y[i] = rows[i].back();
  }
  fm.validate();
  return fm;
}

namespace {
constexpr std::string_view kPredictionsHeader = "job_id,app,exec_time,predicted";
}

void write_predictions(std::span<const PredictionRow> rows, const std::filesystem::path& path) {
  FileWriter out(path);
  out.put(kPredictionsHeader);
  out.put('\n');
  for (const PredictionRow& r : rows) {
    out.put(r.job_id);
    out.put(',');
    out.put(r.app);
    out.put(',');
    out.put_double(r.exec_time);
    out.put(',');
    out.put_double(r.predicted);
    out.put('\n');
  }
}

std::vector<PredictionRow> read_predictions(const std::filesystem::path& path) {
  CsvReader reader(path, kPredictionsHeader);
  std::vector<PredictionRow> rows;
  std::vector<std::string_view> f;
  while (reader.next_row(f, 4)) {
    PredictionRow r;
    r.job_id = std::string(f[0]);
    r.app = std::string(f[1]);
    r.exec_time = parse_double(f[2]);
    r.predicted = parse_double(f[3]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_metric_report(std::span<const std::pair<std::string, std::string>> rows,
                         const std::filesystem::path& path) {
  FileWriter out(path);
  out.put("metric,value\n");
  for (const auto& [metric, value] : rows) {
    out.put(metric);
    out.put(',');
    out.put(value);
    out.put('\n');
  }
}

namespace {
constexpr std::string_view kClassifyHeader = "job_id,label,exec_time";
}

void write_classify_report(std::span<const ClassifyRow> rows, const std::filesystem::path& path) {
  FileWriter out(path);
  out.put(kClassifyHeader);
  out.put('\n');
  for (const ClassifyRow& r : rows) {
    out.put(r.job_id);
    out.put(',');
    out.put(r.label);
    out.put(',');
    out.put_double(r.exec_time);
    out.put('\n');
  }
}

std::vector<ClassifyRow> read_classify_report(const std::filesystem::path& path) {
  CsvReader reader(path, kClassifyHeader);
  std::vector<ClassifyRow> rows;
  std::vector<std::string_view> f;
  while (reader.next_row(f, 3))
    rows.push_back({std::string(f[0]), std::string(f[1]), parse_double(f[2])});
  return rows;
}

void write_cv_report(const EvaluationReport& report, const std::filesystem::path& path) {
  FileWriter out(path);
  out.put("fold,n,mape,psle\n");
  for (const FoldScores& fold : report.folds) {
    out.put_int(fold.fold);
    out.put(',');
    out.put_int(fold.n);
    out.put(',');
    out.put_double(fold.mape);
    out.put(',');
    out.put_double(fold.psle);
    out.put('\n');
  }
  out.put("overall,");
  out.put_int(report.n);
  out.put(',');
  out.put_double(report.mape);
  out.put(',');
  out.put_double(report.psle);
  out.put('\n');
}

namespace {

constexpr int kArtifactFormatVersion = 1;

ordered_json standardizer_to_json(const Standardizer& s) {
  ordered_json j;
  j["feature_mean"] = std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size());
  j["feature_std"] = std::vector<double>(s.std.data(), s.std.data() + s.std.size());
  j["target_mean"] = s.target_mean;
  j["target_std"] = s.target_std;
  return j;
}

Standardizer standardizer_from_json(const ordered_json& j) {
  Standardizer s;
  const auto mean = j.at("feature_mean").get<std::vector<double>>();
  const auto std_ = j.at("feature_std").get<std::vector<double>>();
  s.mean = Eigen::Map<const Vector>(mean.data(), static_cast<Index>(mean.size()));
  s.std = Eigen::Map<const Vector>(std_.data(), static_cast<Index>(std_.size()));
  s.target_mean = j.at("target_mean").get<double>();
  s.target_std = j.at("target_std").get<double>();
  return s;
}

ordered_json matrix_to_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const ordered_json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows[0].size()));
  for (Index i = 0; i < m.rows(); ++i) {
    if (static_cast<Index>(rows[i].size()) != m.cols())
      throw DataError("artifact: ragged weight matrix");
    for (Index j2 = 0; j2 < m.cols(); ++j2) m(i, j2) = rows[i][j2];
  }
  return m;
}

}  // namespace

Vector ModelArtifact::predict_seconds(const Matrix& x_raw) const {
  const Matrix x_std = apply_standardizer(standardizer, x_raw);
  Vector z;
  if (model_type == "gbr") {
    z = gbr->predict(x_std);
  } else if (model_type == "mlp") {
    z = mlp->predict(x_std);
  } else {
    throw DataError("artifact: unknown model type " + model_type);
  }
  return destandardize_predictions(standardizer, z);
}

void save_model_artifact(const ModelArtifact& artifact, const std::filesystem::path& path) {
  ordered_json j;
  j["format_version"] = kArtifactFormatVersion;
  j["model_type"] = artifact.model_type;
  j["seed"] = artifact.seed;
  j["feature_names"] = artifact.feature_names;
  j["standardizer"] = standardizer_to_json(artifact.standardizer);
  if (artifact.model_type == "gbr") {
    if (!artifact.gbr) throw DataError("artifact: gbr model missing");
    const GbrModel& model = *artifact.gbr;
    ordered_json cfg;
    cfg["n_trees"] = model.config().n_trees;
    cfg["learning_rate"] = model.config().learning_rate;
    cfg["max_depth"] = model.config().max_depth;
    cfg["min_samples_leaf"] = model.config().min_samples_leaf;
    j["config"] = cfg;
    j["initial_prediction"] = model.initial_prediction();
    ordered_json trees = ordered_json::array();
    for (const RegressionTree& tree : model.trees()) {
      ordered_json nodes = ordered_json::array();
      for (const TreeNode& n : tree.nodes) {
        ordered_json nj;
        nj["feature"] = n.feature;
        nj["threshold"] = n.threshold;
        nj["left"] = n.left;
        nj["right"] = n.right;
        nj["value"] = n.value;
        nj["impurity_decrease"] = n.impurity_decrease;
        nj["n_samples"] = n.n_samples;
        nodes.push_back(std::move(nj));
      }
      trees.push_back(std::move(nodes));
    }
    j["trees"] = std::move(trees);
  } else if (artifact.model_type == "mlp") {
    if (!artifact.mlp) throw DataError("artifact: mlp model missing");
    const MlpModel& model = *artifact.mlp;
    ordered_json cfg;
    cfg["hidden"] = model.config().hidden;
    cfg["dropout_rate"] = model.config().dropout_rate;
    cfg["epochs"] = model.config().epochs;
    cfg["batch_size"] = model.config().batch_size;
    cfg["learning_rate"] = model.config().learning_rate;
    j["config"] = cfg;
    ordered_json weights;
    weights["w1"] = matrix_to_json(model.params().w1);
    weights["b1"] = std::vector<double>(model.params().b1.data(),
                                        model.params().b1.data() + model.params().b1.size());
    weights["w2"] = matrix_to_json(model.params().w2);
    weights["b2"] = std::vector<double>(model.params().b2.data(),
                                        model.params().b2.data() + model.params().b2.size());
    weights["w3"] = matrix_to_json(model.params().w3);
    weights["b3"] = std::vector<double>(model.params().b3.data(),
                                        model.params().b3.data() + model.params().b3.size());
    j["weights"] = std::move(weights);
  } else {
    throw DataError("artifact: unknown model type " + artifact.model_type);
  }
  FileWriter out(path);
  out.put(j.dump(2));
  out.put('\n');
}

ModelArtifact load_model_artifact(const std::filesystem::path& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": invalid JSON: " + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != kArtifactFormatVersion)
      throw DataError(path.string() + ": unsupported artifact format version");
    ModelArtifact artifact;
    artifact.model_type = j.at("model_type").get<std::string>();
    artifact.seed = j.at("seed").get<std::uint64_t>();
    artifact.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    artifact.standardizer = standardizer_from_json(j.at("standardizer"));
    if (artifact.model_type == "gbr") {
      GbrConfig cfg;
      cfg.n_trees = j.at("config").at("n_trees").get<int>();
      cfg.learning_rate = j.at("config").at("learning_rate").get<double>();
      cfg.max_depth = j.at("config").at("max_depth").get<int>();
      cfg.min_samples_leaf = j.at("config").at("min_samples_leaf").get<int>();
      cfg.seed = artifact.seed;
      std::vector<RegressionTree> trees;
      for (const auto& tj : j.at("trees")) {
        RegressionTree tree;
        for (const auto& nj : tj) {
          TreeNode n;
          n.feature = nj.at("feature").get<int>();
          n.threshold = nj.at("threshold").get<double>();
          n.left = nj.at("left").get<int>();
          n.right = nj.at("right").get<int>();
          n.value = nj.at("value").get<double>();
          n.impurity_decrease = nj.at("impurity_decrease").get<double>();
          n.n_samples = nj.at("n_samples").get<int>();
          tree.nodes.push_back(n);
        }
        trees.push_back(std::move(tree));
      }
      artifact.gbr = GbrModel::from_parts(cfg, j.at("initial_prediction").get<double>(),
                                          std::move(trees),
                                          static_cast<Index>(artifact.feature_names.size()));
    } else if (artifact.model_type == "mlp") {
      MlpConfig cfg;
      const auto hidden = j.at("config").at("hidden").get<std::vector<int>>();
      if (hidden.size() != 2) throw DataError("artifact: mlp hidden sizes must have 2 entries");
      cfg.hidden = {hidden[0], hidden[1]};
      cfg.dropout_rate = j.at("config").at("dropout_rate").get<double>();
      cfg.epochs = j.at("config").at("epochs").get<int>();
      cfg.batch_size = j.at("config").at("batch_size").get<int>();
      cfg.learning_rate = j.at("config").at("learning_rate").get<double>();
      cfg.seed = artifact.seed;
      MlpParams p;
      const auto& w = j.at("weights");
      p.w1 = matrix_from_json(w.at("w1"));
      p.w2 = matrix_from_json(w.at("w2"));
      p.w3 = matrix_from_json(w.at("w3"));
      auto vec = [&](const char* name) {
        const auto v = w.at(name).get<std::vector<double>>();
        return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())));
      };
      p.b1 = vec("b1");
      p.b2 = vec("b2");
      p.b3 = vec("b3");
      artifact.mlp = MlpModel::from_parts(cfg, std::move(p));
    } else {
      throw DataError(path.string() + ": unknown model type " + artifact.model_type);
    }
    return artifact;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir) {
  ordered_json j;
  j["command"] = manifest.command;
  j["config_path"] = manifest.config_path;
  j["seed"] = manifest.seed;
  j["version"] = manifest.version.empty() ? std::string(kVersion) : manifest.version;
  ordered_json inputs = ordered_json::array();
  for (const auto& [p, h] : manifest.inputs) inputs.push_back({{"path", p}, {"hash", h}});
  j["inputs"] = std::move(inputs);
  ordered_json outputs = ordered_json::array();
  for (const auto& [p, h] : manifest.outputs) outputs.push_back({{"path", p}, {"hash", h}});
  j["outputs"] = std::move(outputs);
  FileWriter out(dir / "manifest.json");
  out.put(j.dump(2));
  out.put('\n');
}

}  // namespace dfpred
