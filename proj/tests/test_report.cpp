#include <gtest/gtest.h>

#include <filesystem>

#include "produkt/runner.hpp"

using namespace produkt;
namespace fs = std::filesystem;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "produkt-test-report" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Config, ParseSerializeRoundTrip) {
  const auto c = ExperimentConfig::parse(R"x(decompose --pool full --group A:5 --set "(1 2 3);(1 2)(3 4)")x");
  EXPECT_EQ(c.command, "decompose");
  EXPECT_EQ(c.get("set"), "(1 2 3);(1 2)(3 4)");
  EXPECT_EQ(c.get("cap"), "64");  // fallback
  EXPECT_EQ(c.serialize(), R"x(decompose --group A:5 --set "(1 2 3);(1 2)(3 4)" --pool full)x");
  EXPECT_EQ(ExperimentConfig::parse(c.serialize()), c);
  for (const char* line : {"np-scan --group PSL:2:7 --densities 0.5,0.9 --trials 100 --seed 1",
                           "constructive-an --n 7 --set \"(1 2 3 4 5 6 7)\"",
                           "constructive-psl --group PSL:3:2 --set [[1,1,0],[0,1,0],[0,0,1]] --seed 4",
                           "verify certs/x.json"}) {
    const auto parsed = ExperimentConfig::parse(line);
    EXPECT_EQ(parsed.serialize(), line);
    EXPECT_EQ(ExperimentConfig::parse(parsed.serialize()), parsed);
  }
}

TEST(Config, Errors) {
  EXPECT_EQ(code_of([] { (void)ExperimentConfig::parse("frobnicate --group A:5"); }), ErrorCode::DispatchError);
  EXPECT_EQ(code_of([] { (void)ExperimentConfig::parse("decompose --bogus 1"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { (void)ExperimentConfig::parse("np-scan --group PSL:2:7"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { (void)ExperimentConfig::parse("decompose --group A:5 --set full --pool sample:8"); }),
            ErrorCode::ParseError);
  EXPECT_NO_THROW((void)ExperimentConfig::parse("decompose --group A:5 --set full --pool sample:8 --seed 2"));
}

TEST(Config, FileLines) {
  const auto entries = parse_config_lines(
      "# comment\n\ndecompose --group A:5 --set random:5:1\n   \n  oracle --group A:5 --set random:3:2 # tail\n");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[1].get("set"), "random:3:2");
}

TEST(Literals, SubsetForms) {
  auto G = shared_context(GroupSpec::parse("A:5"));
  EXPECT_EQ(parse_subset(G, "(1 2 3); (1 2)(3 4) ;1").size(), 3u);
  EXPECT_EQ(parse_subset(G, "full").size(), 60u);
  EXPECT_EQ(parse_subset(G, "random:7:3"), random_subset(G, 7, 3));
  EXPECT_EQ(parse_subset(G, "class:(1 2 3)").size(), 20u);
  EXPECT_EQ(parse_subset(G, "centralizer:(1 2)(3 4)").size(), 4u);
  EXPECT_EQ(parse_subset(G, "subgroup:(1 2 3);(2 3 4)").size(), 12u);
  EXPECT_EQ(code_of([&] { (void)parse_subset(G, ""); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { (void)parse_subset(G, "(1 2 3);;(1 2 4)"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { (void)parse_subset(G, "random:x:1"); }), ErrorCode::ParseError);
}

RunRecord sample_record() {
  RunRecord r;
  r.command = "decompose";
  r.group = "A:5";
  r.order = 60;
  r.set_size = 5;
  r.N = 4;
  r.ratio = 1.5723519228734161;
  r.complete = true;
  r.seconds = 0.25;
  r.certificate = "certs/a.json";
  r.measured["lower_bound"] = 3;
  return r;
}

TEST(Emit, CsvShapes) {
  Report empty;
  EXPECT_EQ(emit_report(empty, "csv"), "group,order,set_size,N,ratio,complete,seconds\n");
  Report one;
  one.runs.push_back(sample_record());
  EXPECT_EQ(emit_report(one, "csv"),
            "group,order,set_size,N,ratio,complete,seconds\nA:5,60,5,4,1.572352,true,0.250\n");
  Report table;
  table.table = Table{{"density", "size", "success_fraction"}, {{"0.5000", "13", "1.000000"}}};
  EXPECT_EQ(emit_report(table, "csv"), "density,size,success_fraction\n0.5000,13,1.000000\n");
  EXPECT_EQ(code_of([&] { (void)emit_report(one, "xml"); }), ErrorCode::UnsupportedFormat);
}

TEST(Emit, JsonRoundTrip) {
  Report r;
  r.config = {"decompose --group A:5 --set random:5:42"};
  r.runs.push_back(sample_record());
  r.runs.push_back(sample_record());
  r.runs.back().complete = false;
  r.aggregates = aggregate(r.runs);
  r.table = Table{{"step", "size", "epsilon"}, {{"0", "5", ""}, {"1", "51", "1.442981"}}};
  r.attachments["note"] = Json::array({1, 2, 3});
  EXPECT_EQ(parse_report(emit_report(r, "json")), r);
  EXPECT_EQ(emit_report(parse_report(emit_report(r, "json")), "json"), emit_report(r, "json"));
  EXPECT_EQ(code_of([] { (void)parse_report("{"); }), ErrorCode::ParseError);
}

TEST(Run, DecomposeWritesReplayableCertificate) {
  const auto dir = scratch("decompose");
  auto c = ExperimentConfig::parse("decompose --group A:5 --set random:5:42 --pool full");
  c.set("cert-dir", dir.string());
  c.set("out", (dir / "report.json").string());
  const auto result = run_experiment(c);
  EXPECT_EQ(result.exit_code, 0);
  ASSERT_EQ(result.report.runs.size(), 1u);
  const auto& rec = result.report.runs[0];
  EXPECT_TRUE(rec.complete);
  EXPECT_GE(rec.ratio, 1.0);
  EXPECT_TRUE(fs::exists(rec.certificate));
  EXPECT_TRUE(verify_file(rec.certificate).ok);
  EXPECT_EQ(without_timings(parse_report(read_file(dir / "report.json"))), without_timings(result.report));
  for (const auto& entry : fs::directory_iterator(dir)) EXPECT_NE(entry.path().extension(), ".tmp");
}

TEST(Run, TamperedCertificateFailsVerification) {
  const auto dir = scratch("tamper");
  auto c = ExperimentConfig::parse("decompose --group PSL:2:7 --set random:4:9");
  c.set("cert", (dir / "c.json").string());
  const auto rec = run_experiment(c).report.runs[0];
  auto j = Json::parse(read_file(rec.certificate));
  ASSERT_TRUE(verify_certificate(j).ok);
  j["conjugators"].erase(j["conjugators"].size() - 1);
  EXPECT_FALSE(verify_certificate(j).ok);
}

TEST(Run, PartialRunsExitWithTwo) {
  const auto dir = scratch("partial");
  auto c = ExperimentConfig::parse("decompose --group A:6 --set random:2:1 --cap 2");
  c.set("cert-dir", dir.string());
  EXPECT_EQ(run_experiment(c).exit_code, 2);
}

TEST(Run, IdenticalSeedsGiveIdenticalCertificates) {
  const auto dir = scratch("det");
  for (const char* line : {"growth --group PSL:2:11 --seed 3", "np-scan --group PSL:2:7 --trials 20 --seed 1",
                           "gen-conj --group A:7 --element \"(1 2 3)\" --seed 5",
                           "constructive-psl --group PSL:3:2 --set [[1,1,1],[0,1,0],[0,0,1]] --seed 2",
                           "cover --group A:6 --subgroup \"subgroup:(1 2 3);(1 2)(4 5)\" --pool sample:40 --seed 8"}) {
    auto c = ExperimentConfig::parse(line);
    c.set("cert-dir", dir.string());
    const auto first = run_experiment(c);
    const auto path = first.report.runs[0].certificate;
    const auto bytes = read_file(path);
    const auto second = run_experiment(c);
    EXPECT_EQ(second.report.runs[0].certificate, path);
    EXPECT_EQ(read_file(path), bytes) << line;
    EXPECT_TRUE(verify_file(path).ok) << line;
    EXPECT_EQ(emit_report(without_timings(first.report), "json"), emit_report(without_timings(second.report), "json"));
  }
}

TEST(Run, ConstructiveAlternatingReportsThePipelineLength) {
  const auto dir = scratch("an");
  auto c = ExperimentConfig::parse("constructive-an --n 7 --set \"(1 2 3 4 5 6 7)\"");
  c.set("cert-dir", dir.string());
  const auto r = run_experiment(c).report;
  EXPECT_EQ(r.runs[0].N, 360u);
  EXPECT_TRUE(r.runs[0].complete);
  EXPECT_TRUE(r.runs[0].reference.contains("bound"));
  EXPECT_TRUE(r.attachments.contains("witness_chain"));
  EXPECT_TRUE(verify_file(r.runs[0].certificate).ok);
}

TEST(Run, SuiteFromFileMergesInOrder) {
  const auto dir = scratch("suite");
  write_atomically(dir / "suite.txt",
                   "# two entries\ndecompose --group A:5 --set random:6:1\noracle --group A:5 --set random:12:2\n");
  auto c = ExperimentConfig::parse("suite --seed 1");
  c.set("config", (dir / "suite.txt").string());
  c.set("cert-dir", dir.string());
  const auto r = run_experiment(c).report;
  ASSERT_EQ(r.runs.size(), 2u);
  EXPECT_EQ(r.runs[0].command, "decompose");
  EXPECT_EQ(r.runs[1].command, "oracle");
  EXPECT_EQ(r.config.size(), 3u);
  EXPECT_TRUE(r.aggregates["max_ratio"].contains("A"));
}

TEST(Run, UnknownCommandsAreRejected) {
  EXPECT_EQ(code_of([] { (void)run_experiment(ExperimentConfig::parse("verify x.json")); }), ErrorCode::DispatchError);
}

}  // namespace
