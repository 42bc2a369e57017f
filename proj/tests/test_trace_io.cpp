#include "mvtraffic/trace_io.hpp"

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "builders.hpp"

using namespace mvtraffic;

namespace {

std::string scratch(const std::string& name) {
  static const std::filesystem::path dir = [] {
    const auto d = std::filesystem::temp_directory_path() / "mvtraffic_io_tests";
    std::filesystem::create_directories(d);
    return d;
  }();
  return (dir / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

GopStructure two_view_structure() {
  GopStructure st;
  st.num_views = 2;
  st.gop_len = 2;
  st.fps = 30.0;
  st.frame_labels = {FrameType::I, FrameType::P, FrameType::I, FrameType::B};
  st.bin_counts = {8, 4, 8, 4};
  st.view_deps = {{1, 0}};
  return st;
}

Trace two_view_trace() {
  Trace trace;
  trace.structure = two_view_structure();
  trace.gops = {GopVector{100.0, 20.0, 80.0, 10.0}, GopVector{110.0, 25.0, 85.0, 15.0}};
  return trace;
}

// Header plus one full GOP of the two-view structure.
const char* kGoodCsv =
    "gop,view,pos,type,bytes\n"
    "0,0,0,I,100\n"
    "0,0,1,P,20\n"
    "0,1,0,I,80\n"
    "0,1,1,B,10\n";

void check_read_error(const std::string& name, const std::string& text,
                      const std::string& needle) {
  const std::string path = scratch(name);
  write_text(path, text);
  try {
    (void)read_trace(path, two_view_structure());
    FAIL("expected read_trace to reject " << name);
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    CHECK_MESSAGE(what.find(needle) != std::string::npos,
                  "message '" << what << "' lacks '" << needle << "'");
  }
}

}  // namespace

TEST_CASE("traces survive a write and read unchanged") {
  const Trace trace = two_view_trace();
  const std::string path = scratch("roundtrip.csv");
  write_trace(trace, path);

  const Trace back = read_trace(path, trace.structure);
  REQUIRE(back.size() == trace.size());
  for (std::size_t n = 0; n < trace.size(); ++n) {
    for (std::size_t f = 0; f < trace.gops[n].size(); ++f) {
      CHECK(back.gops[n][f] == trace.gops[n][f]);
    }
  }

  // Writing the read-back trace reproduces the file byte for byte.
  const std::string again = scratch("roundtrip_again.csv");
  write_trace(back, again);
  CHECK(slurp(again) == slurp(path));
}

TEST_CASE("fractional sizes are written as rounded integers") {
  Trace trace = two_view_trace();
  trace.gops[0][0] = 100.6;
  trace.gops[0][1] = 19.4;
  const std::string path = scratch("rounded.csv");
  write_trace(trace, path);
  const Trace back = read_trace(path, trace.structure);
  CHECK(back.gops[0][0] == 101.0);
  CHECK(back.gops[0][1] == 19.0);
}

TEST_CASE("the structure can be inferred from the rows") {
  const std::string path = scratch("inferred.csv");
  write_trace(two_view_trace(), path);
  const Trace back = read_trace(path);
  CHECK(back.structure.num_views == 2);
  CHECK(back.structure.gop_len == 2);
  CHECK(back.structure.fps == 25.0);  // not stored in the CSV
  CHECK(back.structure.frame_labels ==
        std::vector<FrameType>{FrameType::I, FrameType::P, FrameType::I, FrameType::B});
  CHECK(back.structure.bin_counts == std::vector<int>{10, 10, 10, 10});
  CHECK(back.gops[1][2] == 85.0);
}

TEST_CASE("trace readers report the offending line") {
  check_read_error("bad_header.csv", "gop,view,pos,kind,bytes\n0,0,0,I,1\n", ":1:");
  check_read_error("bad_type.csv",
                   "gop,view,pos,type,bytes\n0,0,0,I,100\n0,0,1,Q,20\n", ":3:");
  check_read_error("bad_bytes.csv",
                   "gop,view,pos,type,bytes\n0,0,0,I,-5\n",
                   "bytes must be a nonnegative integer");
  check_read_error("bad_fields.csv",
                   "gop,view,pos,type,bytes\n0,0,0,I\n", "expected 5 fields");
  check_read_error("out_of_order.csv",
                   "gop,view,pos,type,bytes\n"
                   "0,0,0,I,100\n0,1,0,I,80\n0,0,1,P,20\n0,1,1,B,10\n",
                   "canonical order");
  check_read_error("label_mismatch.csv",
                   "gop,view,pos,type,bytes\n"
                   "0,0,0,I,100\n0,0,1,I,20\n0,1,0,I,80\n0,1,1,B,10\n",
                   "does not match the structure");
  check_read_error("mid_gop.csv", std::string(kGoodCsv) + "1,0,0,I,100\n", "mid-GOP");
  check_read_error("blank_line.csv", std::string(kGoodCsv) + "\n", "blank line");
  check_read_error("empty.csv", "", "empty file");
  CHECK_THROWS_AS((void)read_trace(scratch("missing.csv"), two_view_structure()),
                  std::runtime_error);
}

TEST_CASE("structure files round trip through JSON") {
  const GopStructure st = two_view_structure();
  const std::string path = scratch("structure.json");
  write_structure(st, path);
  const GopStructure back = read_structure(path);
  CHECK(back.num_views == st.num_views);
  CHECK(back.gop_len == st.gop_len);
  CHECK(back.fps == st.fps);
  CHECK(back.frame_labels == st.frame_labels);
  CHECK(back.bin_counts == st.bin_counts);
  CHECK(back.view_deps == st.view_deps);
}

TEST_CASE("other format versions are refused") {
  const std::string path = scratch("structure_v2.json");
  write_structure(two_view_structure(), path);
  std::string text = slurp(path);
  const std::string key = "\"format_version\": 1";
  text.replace(text.find(key), key.size(), "\"format_version\": 2");
  write_text(path, text);
  try {
    (void)read_structure(path);
    FAIL("expected a version error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("unsupported format_version 2") != std::string::npos);
  }

  const std::string bare = scratch("structure_versionless.json");
  write_text(bare, "{\"num_views\": 1}");
  try {
    (void)read_structure(bare);
    FAIL("expected a missing-version error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("missing format_version") != std::string::npos);
  }
}

TEST_CASE("invalid JSON and invalid structures carry the path in the error") {
  const std::string path = scratch("broken.json");
  write_text(path, "{not json");
  try {
    (void)read_structure(path);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(path) != std::string::npos);
  }

  const std::string invalid = scratch("invalid_structure.json");
  write_text(invalid,
             "{\"format_version\": 1, \"num_views\": 0, \"gop_len\": 2, \"fps\": 25,"
             " \"frame_labels\": [], \"bin_counts\": [], \"view_deps\": []}");
  CHECK_THROWS_AS((void)read_structure(invalid), std::runtime_error);
}

TEST_CASE("models round trip exactly") {
  Rng rng(31);
  const PhmmParams params = builders::random_params(rng, 3, 4, 5);
  const GopStructure st = builders::flat_structure(4, 5);
  const std::string path = scratch("model.json");
  write_model(params, st, path);

  const auto [back, structure] = read_model(path);
  CHECK(back.num_states == params.num_states);
  CHECK(back.pi == params.pi);
  CHECK(back.trans == params.trans);
  CHECK(back.lambda == params.lambda);
  CHECK(back.emissions == params.emissions);
  REQUIRE(back.grid.positions.size() == params.grid.positions.size());
  for (std::size_t f = 0; f < back.grid.positions.size(); ++f) {
    CHECK(back.grid.positions[f].lower == params.grid.positions[f].lower);
    CHECK(back.grid.positions[f].upper == params.grid.positions[f].upper);
    CHECK(back.grid.positions[f].bins == params.grid.positions[f].bins);
  }
  CHECK(structure.gop_len == st.gop_len);
  CHECK(structure.bin_counts == st.bin_counts);
}

TEST_CASE("model files whose grid contradicts the structure are refused") {
  Rng rng(32);
  const PhmmParams params = builders::random_params(rng, 2, 3, 4);
  const GopStructure st = builders::flat_structure(3, 4);
  const std::string path = scratch("model_patched.json");
  write_model(params, st, path);
  std::string text = slurp(path);
  const std::string key = "\"bin_counts\": [\n      4,\n      4,\n      4\n    ]";
  REQUIRE(text.find(key) != std::string::npos);
  text.replace(text.find(key), key.size(),
               "\"bin_counts\": [\n      4,\n      4,\n      8\n    ]");
  write_text(path, text);
  try {
    (void)read_model(path);
    FAIL("expected a grid mismatch error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("grid bins differ") != std::string::npos);
  }
}

TEST_CASE("view-switching parameters round trip") {
  VsmParams params;
  params.num_views = 2;
  params.trans = {{0.0, 1.0}, {1.0, 0.0}};
  params.mean_stay_s = {360.0, 60.0};
  params.std_stay_s = {30.0, 10.0};
  const std::string path = scratch("vsm.json");
  write_vsm(params, path);
  const VsmParams back = read_vsm(path);
  CHECK(back.num_views == 2);
  CHECK(back.trans == params.trans);
  CHECK(back.mean_stay_s == params.mean_stay_s);
  CHECK(back.std_stay_s == params.std_stay_s);

  const std::string bad = scratch("vsm_bad.json");
  write_text(bad,
             "{\"format_version\": 1, \"num_views\": 2,"
             " \"trans\": [[0.5, 0.5], [1.0, 0.0]],"
             " \"mean_stay_s\": [1.0, 1.0], \"std_stay_s\": [1.0, 1.0]}");
  CHECK_THROWS_AS((void)read_vsm(bad), std::runtime_error);
}

TEST_CASE("simulation configs treat null buffers as unbounded") {
  SimConfig config;
  config.channel_rate_ratio = 1.5;
  config.monte_carlo_runs = 7;
  config.seed = 99;
  const std::string path = scratch("sim_inf.json");
  write_sim_config(config, path);
  CHECK(slurp(path).find("\"sender_buffer_bits\": null") != std::string::npos);

  const SimConfig back = read_sim_config(path);
  CHECK(std::isinf(back.sender_buffer_bits));
  CHECK(std::isinf(back.receiver_buffer_bits));
  CHECK(back.channel_rate_ratio == 1.5);
  CHECK(back.monte_carlo_runs == 7);
  CHECK(back.seed == 99);

  config.sender_buffer_bits = 250'000.0;
  config.receiver_buffer_bits = 500'000.0;
  const std::string finite = scratch("sim_finite.json");
  write_sim_config(config, finite);
  const SimConfig fin = read_sim_config(finite);
  CHECK(fin.sender_buffer_bits == 250'000.0);
  CHECK(fin.receiver_buffer_bits == 500'000.0);
}

TEST_CASE("an empty simulation config yields the defaults") {
  const std::string path = scratch("sim_empty.json");
  write_text(path, "{}");
  const SimConfig config = read_sim_config(path);
  CHECK(std::isinf(config.sender_buffer_bits));
  CHECK(config.channel_rate_ratio == 2.0);
  CHECK(config.channel.loss_prob == 0.025);
  CHECK(config.monte_carlo_runs == 10);

  const std::string bad = scratch("sim_bad.json");
  write_text(bad, "{\"monte_carlo_runs\": 0}");
  CHECK_THROWS_AS((void)read_sim_config(bad), std::runtime_error);
}

TEST_CASE("auxiliary CSV writers emit their documented layouts") {
  FitReport report;
  report.log_likelihoods = {-10.0, -8.5};
  const std::string fit_path = scratch("fit.csv");
  write_fit_report_csv(report, fit_path);
  CHECK(slurp(fit_path) == "iteration,log_likelihood\n1,-10\n2,-8.5\n");

  ViewSchedule schedule;
  schedule.horizon_s = 5.0;
  schedule.segments = {{0, 0.0, 2.5}, {1, 2.5, 5.0}};
  const std::string sched_path = scratch("schedule.csv");
  write_schedule_csv(schedule, sched_path);
  CHECK(slurp(sched_path) == "view,start_s,end_s\n0,0,2.5\n1,2.5,5\n");

  const std::string acf_path = scratch("acf.csv");
  write_acf_csv({1.0, 0.25}, acf_path);
  CHECK(slurp(acf_path) == "lag,acf\n0,1\n1,0.25\n");

  const std::string qq_path = scratch("qq.csv");
  write_qq_csv({{1.5, 2.5}}, qq_path);
  CHECK(slurp(qq_path) == "quantile_a,quantile_b\n1.5,2.5\n");
}
