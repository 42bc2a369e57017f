#include "mvtraffic/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mvtraffic {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw std::runtime_error(path + ": " + message);
}

[[noreturn]] void fail_line(const std::string& path, std::size_t line,
                            const std::string& message) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + message);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) fail(path, "write failed");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open for reading");
  return in;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

constexpr const char* kTraceHeader = "gop,view,pos,type,bytes";

struct TraceRow {
  long gop = 0;
  int view = 0;
  int pos = 0;
  char type = 0;
  double bytes = 0.0;
};

bool parse_long(const std::string& field, long& out) {
  if (field.empty() || field.size() > 18) return false;
  long value = 0;
  for (char c : field) {
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

std::vector<TraceRow> parse_trace_rows(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) fail(path, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) {
    fail_line(path, 1, "expected header '" + std::string(kTraceHeader) + "'");
  }

  std::vector<TraceRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      fail_line(path, line_no, "blank line");
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 5) {
      fail_line(path, line_no, "expected 5 fields, found " + std::to_string(fields.size()));
    }
    TraceRow row;
    long value = 0;
    if (!parse_long(fields[0], value)) fail_line(path, line_no, "bad GOP index");
    row.gop = value;
    if (!parse_long(fields[1], value)) fail_line(path, line_no, "bad view index");
    row.view = static_cast<int>(value);
    if (!parse_long(fields[2], value)) fail_line(path, line_no, "bad position index");
    row.pos = static_cast<int>(value);
    if (fields[3].size() != 1) fail_line(path, line_no, "bad frame type");
    try {
      frame_type_from_char(fields[3][0]);
    } catch (const std::invalid_argument&) {
      fail_line(path, line_no, "bad frame type '" + fields[3] + "'");
    }
    row.type = fields[3][0];
    if (!parse_long(fields[4], value)) {
      fail_line(path, line_no, "bytes must be a nonnegative integer");
    }
    row.bytes = static_cast<double>(value);
    rows.push_back(row);
  }
  if (rows.empty()) fail(path, "trace has no GOPs");
  return rows;
}

// Canonical-order walk shared by both readers; `line` of row r is r + 2.
Trace assemble_trace(const std::vector<TraceRow>& rows, const GopStructure& structure,
                     const std::string& path) {
  structure.require_valid();
  const std::size_t nf = static_cast<std::size_t>(structure.frames_per_gop());
  if (rows.size() % nf != 0) {
    fail(path, "trace ends mid-GOP (" + std::to_string(rows.size()) + " rows, " +
                   std::to_string(nf) + " frames per GOP)");
  }

  Trace trace;
  trace.structure = structure;
  trace.gops.resize(rows.size() / nf, GopVector(nf));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t line = r + 2;
    const long gop = static_cast<long>(r / nf);
    const int within = static_cast<int>(r % nf);
    const int view = within / structure.gop_len;
    const int pos = within % structure.gop_len;
    const TraceRow& row = rows[r];
    if (row.gop != gop || row.view != view || row.pos != pos) {
      fail_line(path, line,
                "row out of canonical order: expected gop " + std::to_string(gop) +
                    " view " + std::to_string(view) + " pos " + std::to_string(pos));
    }
    const char expected = frame_type_char(structure.frame_labels[within]);
    if (row.type != expected) {
      fail_line(path, line, std::string("frame type '") + row.type +
                                "' does not match the structure ('" + expected + "')");
    }
    trace.gops[gop][within] = row.bytes;
  }
  return trace;
}

json structure_to_json(const GopStructure& structure) {
  json labels = json::array();
  for (FrameType t : structure.frame_labels) {
    labels.push_back(std::string(1, frame_type_char(t)));
  }
  json deps = json::array();
  for (const auto& [v, w] : structure.view_deps) deps.push_back(json::array({v, w}));
  return json{{"num_views", structure.num_views},
              {"gop_len", structure.gop_len},
              {"fps", structure.fps},
              {"frame_labels", labels},
              {"bin_counts", structure.bin_counts},
              {"view_deps", deps}};
}

GopStructure structure_from_json(const json& j) {
  GopStructure structure;
  structure.num_views = j.at("num_views").get<int>();
  structure.gop_len = j.at("gop_len").get<int>();
  structure.fps = j.at("fps").get<double>();
  for (const auto& label : j.at("frame_labels")) {
    const std::string s = label.get<std::string>();
    if (s.size() != 1) throw std::invalid_argument("frame label must be one character");
    structure.frame_labels.push_back(frame_type_from_char(s[0]));
  }
  structure.bin_counts = j.at("bin_counts").get<std::vector<int>>();
  for (const auto& dep : j.at("view_deps")) {
    structure.view_deps.emplace_back(dep.at(0).get<int>(), dep.at(1).get<int>());
  }
  structure.require_valid();
  return structure;
}

json parse_json_file(const std::string& path) {
  std::ifstream in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(path, e.what());
  }
}

void check_format_version(const json& j, const std::string& path) {
  if (!j.contains("format_version")) fail(path, "missing format_version");
  const int version = j.at("format_version").get<int>();
  if (version != 1) {
    fail(path, "unsupported format_version " + std::to_string(version) +
                   " (this build reads version 1)");
  }
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
  finish_output(out, path);
}

}  // namespace

void write_trace(const Trace& trace, const std::string& path) {
  trace.require_valid();
  if (trace.gops.empty()) fail(path, "refusing to write a trace with no GOPs");
  const GopStructure& st = trace.structure;
  std::ofstream out = open_output(path);
  out << kTraceHeader << '\n';
  for (std::size_t n = 0; n < trace.size(); ++n) {
    for (int v = 0; v < st.num_views; ++v) {
      for (int p = 0; p < st.gop_len; ++p) {
        const int f = st.position(v, p);
        const long long bytes = std::llround(std::max(0.0, trace.gops[n][f]));
        out << n << ',' << v << ',' << p << ','
            << frame_type_char(st.frame_labels[f]) << ',' << bytes << '\n';
      }
    }
  }
  finish_output(out, path);
}

Trace read_trace(const std::string& path, const GopStructure& structure) {
  return assemble_trace(parse_trace_rows(path), structure, path);
}

Trace read_trace(const std::string& path) {
  const std::vector<TraceRow> rows = parse_trace_rows(path);
  GopStructure structure;
  for (const TraceRow& row : rows) {
    structure.num_views = std::max(structure.num_views, row.view + 1);
    structure.gop_len = std::max(structure.gop_len, row.pos + 1);
  }
  const std::size_t nf = static_cast<std::size_t>(structure.frames_per_gop());
  if (rows.size() < nf) fail(path, "trace ends mid-GOP");
  for (std::size_t f = 0; f < nf; ++f) {
    structure.frame_labels.push_back(frame_type_from_char(rows[f].type));
  }
  structure.bin_counts.assign(nf, 10);
  return assemble_trace(rows, structure, path);
}

void write_structure(const GopStructure& structure, const std::string& path) {
  structure.require_valid();
  json j = structure_to_json(structure);
  j["format_version"] = 1;
  write_json_file(j, path);
}

GopStructure read_structure(const std::string& path) {
  const json j = parse_json_file(path);
  try {
    check_format_version(j, path);
    return structure_from_json(j);
  } catch (const json::exception& e) {
    fail(path, e.what());
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

void write_model(const PhmmParams& params, const GopStructure& structure,
                 const std::string& path) {
  params.require_valid();
  structure.require_valid();
  json grid = json::array();
  for (const BinRange& r : params.grid.positions) {
    grid.push_back(json{{"lower", r.lower}, {"upper", r.upper}, {"bins", r.bins}});
  }
  const json j{{"format_version", 1},
               {"structure", structure_to_json(structure)},
               {"pi", params.pi},
               {"trans", params.trans},
               {"lambda", params.lambda},
               {"grid", grid},
               {"emissions", params.emissions}};
  write_json_file(j, path);
}

std::pair<PhmmParams, GopStructure> read_model(const std::string& path) {
  const json j = parse_json_file(path);
  try {
    check_format_version(j, path);
    const GopStructure structure = structure_from_json(j.at("structure"));
    PhmmParams params;
    params.pi = j.at("pi").get<std::vector<double>>();
    params.num_states = static_cast<int>(params.pi.size());
    params.trans = j.at("trans").get<std::vector<std::vector<double>>>();
    params.lambda = j.at("lambda").get<std::vector<double>>();
    for (const auto& r : j.at("grid")) {
      params.grid.positions.push_back(BinRange{r.at("lower").get<double>(),
                                               r.at("upper").get<double>(),
                                               r.at("bins").get<int>()});
    }
    params.emissions =
        j.at("emissions").get<std::vector<std::vector<std::vector<double>>>>();
    params.require_valid();
    if (params.grid.num_positions() !=
        static_cast<std::size_t>(structure.frames_per_gop())) {
      fail(path, "grid does not cover the structure's GOP positions");
    }
    for (int f = 0; f < structure.frames_per_gop(); ++f) {
      if (params.grid.positions[f].bins != structure.bin_counts[f]) {
        fail(path, "grid bins differ from the structure at position " + std::to_string(f));
      }
    }
    return {std::move(params), structure};
  } catch (const json::exception& e) {
    fail(path, e.what());
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

void write_vsm(const VsmParams& params, const std::string& path) {
  params.require_valid();
  const json j{{"format_version", 1},
               {"num_views", params.num_views},
               {"trans", params.trans},
               {"mean_stay_s", params.mean_stay_s},
               {"std_stay_s", params.std_stay_s}};
  write_json_file(j, path);
}

VsmParams read_vsm(const std::string& path) {
  const json j = parse_json_file(path);
  try {
    check_format_version(j, path);
    VsmParams params;
    params.num_views = j.at("num_views").get<int>();
    params.trans = j.at("trans").get<std::vector<std::vector<double>>>();
    params.mean_stay_s = j.at("mean_stay_s").get<std::vector<double>>();
    params.std_stay_s = j.at("std_stay_s").get<std::vector<double>>();
    params.require_valid();
    return params;
  } catch (const json::exception& e) {
    fail(path, e.what());
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

SimConfig read_sim_config(const std::string& path) {
  const json j = parse_json_file(path);
  try {
    SimConfig config;
    auto buffer = [&](const char* key, double& out) {
      if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<double>();
    };
    buffer("sender_buffer_bits", config.sender_buffer_bits);
    buffer("receiver_buffer_bits", config.receiver_buffer_bits);
    if (j.contains("channel_rate_bps")) {
      config.channel_rate_bps = j.at("channel_rate_bps").get<double>();
    }
    if (j.contains("channel_rate_ratio")) {
      config.channel_rate_ratio = j.at("channel_rate_ratio").get<double>();
    }
    if (j.contains("channel")) {
      const json& c = j.at("channel");
      if (c.contains("gamma_shape")) config.channel.gamma_shape = c.at("gamma_shape").get<double>();
      if (c.contains("gamma_rate")) config.channel.gamma_rate = c.at("gamma_rate").get<double>();
      if (c.contains("loss_prob")) config.channel.loss_prob = c.at("loss_prob").get<double>();
    }
    if (j.contains("prefetch_delay_s")) {
      config.prefetch_delay_s = j.at("prefetch_delay_s").get<double>();
    }
    if (j.contains("packet_size_bytes")) {
      config.packet_size_bytes = j.at("packet_size_bytes").get<double>();
    }
    if (j.contains("monte_carlo_runs")) {
      config.monte_carlo_runs = j.at("monte_carlo_runs").get<int>();
    }
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("auto_size_sender")) {
      config.auto_size_sender = j.at("auto_size_sender").get<bool>();
    }
    if (j.contains("auto_size_target")) {
      config.auto_size_target = j.at("auto_size_target").get<double>();
    }
    config.require_valid();
    return config;
  } catch (const json::exception& e) {
    fail(path, e.what());
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

void write_sim_config(const SimConfig& config, const std::string& path) {
  config.require_valid();
  json j{{"channel_rate_bps", config.channel_rate_bps},
         {"channel_rate_ratio", config.channel_rate_ratio},
         {"channel",
          {{"gamma_shape", config.channel.gamma_shape},
           {"gamma_rate", config.channel.gamma_rate},
           {"loss_prob", config.channel.loss_prob}}},
         {"prefetch_delay_s", config.prefetch_delay_s},
         {"packet_size_bytes", config.packet_size_bytes},
         {"monte_carlo_runs", config.monte_carlo_runs},
         {"seed", config.seed},
         {"auto_size_sender", config.auto_size_sender},
         {"auto_size_target", config.auto_size_target}};
  // Unbounded buffers serialize as null, mirroring the reader.
  j["sender_buffer_bits"] = std::isinf(config.sender_buffer_bits)
                                ? json(nullptr)
                                : json(config.sender_buffer_bits);
  j["receiver_buffer_bits"] = std::isinf(config.receiver_buffer_bits)
                                  ? json(nullptr)
                                  : json(config.receiver_buffer_bits);
  write_json_file(j, path);
}

void write_fit_report_csv(const FitReport& report, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "iteration,log_likelihood\n";
  for (std::size_t i = 0; i < report.log_likelihoods.size(); ++i) {
    out << (i + 1) << ',' << format_double(report.log_likelihoods[i]) << '\n';
  }
  finish_output(out, path);
}

void write_schedule_csv(const ViewSchedule& schedule, const std::string& path) {
  schedule.require_valid();
  std::ofstream out = open_output(path);
  out << "view,start_s,end_s\n";
  for (const ViewSegment& s : schedule.segments) {
    out << s.view << ',' << format_double(s.start_s) << ',' << format_double(s.end_s)
        << '\n';
  }
  finish_output(out, path);
}

void write_acf_csv(const std::vector<double>& values, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "lag,acf\n";
  for (std::size_t h = 0; h < values.size(); ++h) {
    out << h << ',' << format_double(values[h]) << '\n';
  }
  finish_output(out, path);
}

void write_qq_csv(const std::vector<std::pair<double, double>>& points,
                  const std::string& path) {
  std::ofstream out = open_output(path);
  out << "quantile_a,quantile_b\n";
  for (const auto& [a, b] : points) {
    out << format_double(a) << ',' << format_double(b) << '\n';
  }
  finish_output(out, path);
}

}  // namespace mvtraffic
