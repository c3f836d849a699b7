#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("ffgap_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args, const std::string& env = "") {
  const auto out = scratch() / "stdout", err = scratch() / "stderr";
  const std::string cmd = env + " \"" + std::string(std::getenv("FFGAP_CLI")) + "\" " + args + " > \"" +
                          out.string() + "\" 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
      if (c == '"')
        quoted = !quoted;
      else if (c == ',' && !quoted) {
        cells.push_back(cell);
        cell.clear();
      } else
        cell += c;
    }
    cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  ADD_FAILURE() << "missing column " << name;
  return 0;
}

fs::path write(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

double number_after(const std::string& text, const std::string& key) {
  const auto pos = text.find(key);
  if (pos == std::string::npos) {
    ADD_FAILURE() << "missing '" << key << "' in\n" << text;
    return 0.0;
  }
  return std::strtod(text.c_str() + pos + key.size(), nullptr);
}

}  // namespace

TEST(Cli, HelpDocumentsEveryExitCode) {
  const auto r = run("--help");
  EXPECT_EQ(r.code, 0);
  for (int code = 0; code <= 15; ++code) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%4d  ", code);
    EXPECT_NE(r.out.find(buf), std::string::npos) << code;
  }
  EXPECT_NE(r.out.find("FFGAP_CACHE_DIR"), std::string::npos);
  for (const char* sub : {"gap", "dl-check", "certify", "scaling", "coloring", "validate"})
    EXPECT_NE(r.out.find(sub), std::string::npos);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("gap --model nope").code, 2);
}

TEST(Cli, GapExamples) {
  const auto two = run("gap --extents 2");
  ASSERT_EQ(two.code, 0) << two.err;
  EXPECT_NE(two.err.find("gap          0.99999999999999"), std::string::npos);
  const auto rows = csv_rows(two.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(std::stod(rows[1][column(rows[0], "gap")]), 1.0, 1e-12);
  EXPECT_EQ(rows[1][column(rows[0], "kernel_dim")], "3");

  const double golden = std::stod(slurp(fs::path(std::getenv("FFGAP_TEST_DATA")) / "fm_chain_10_gap.txt"));
  const auto ten = run("gap --extents 10 --quiet");
  ASSERT_EQ(ten.code, 0);
  const auto r10 = csv_rows(ten.out);
  EXPECT_NEAR(std::stod(r10[1][column(r10[0], "gap")]), golden, 1e-9);
  EXPECT_EQ(ten.err, "");

  EXPECT_EQ(run("gap --extents 30").code, 6);
  EXPECT_EQ(run("gap --extents 6 --sparse-max 8").code, 6);
}

TEST(Cli, SeventeenDigitsAndByteIdentity) {
  const auto a = run("gap --model low_rank --extents 7 --seed 11 --quiet");
  const auto b = run("gap --model low_rank --extents 7 --seed 11 --quiet");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto rows = csv_rows(a.out);
  const std::string cell = rows[1][column(rows[0], "gap")];
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", std::stod(cell));
  EXPECT_EQ(cell, buf);

  const auto csv = scratch() / "cert.csv";
  const std::string args = "certify --model commuting_toy --extents 20 --k-max 3 --csv " + csv.string();
  ASSERT_EQ(run(args + " --threads 2").code, 0);
  const std::string first = slurp(csv);
  ASSERT_EQ(run(args + " --threads 1").code, 0);
  EXPECT_EQ(slurp(csv), first);
}

TEST(Cli, ConfigFileVersionedFlatAndOverridable) {
  const auto good = write("good.json", R"({"schema_version": 1, "model": "heisenberg_fm", "extents": [10], "quiet": true})");
  const auto base = run("gap --config " + good.string());
  ASSERT_EQ(base.code, 0) << base.err;
  EXPECT_EQ(csv_rows(base.out)[1][1], "10");
  const auto over = run("gap --config " + good.string() + " --extents 4");
  ASSERT_EQ(over.code, 0);
  EXPECT_EQ(csv_rows(over.out)[1][1], "4");

  EXPECT_EQ(run("gap --config " + write("unknown.json", R"({"schema_version":1,"colour":2})").string()).code, 3);
  EXPECT_EQ(run("gap --config " + write("version.json", R"({"schema_version":7})").string()).code, 3);
  EXPECT_EQ(run("gap --config " + write("noversion.json", R"({"model":"aklt"})").string()).code, 3);
  EXPECT_EQ(run("gap --config " + write("nested.json", R"({"schema_version":1,"extents":{"n":3}})").string()).code, 3);
  EXPECT_EQ(run("gap --config " + write("type.json", R"({"schema_version":1,"t":"big"})").string()).code, 3);
  EXPECT_EQ(run("gap --config " + write("bad.json", "{").string()).code, 4);
  EXPECT_EQ(run("gap --config /nonexistent/ffgap.json").code, 5);
  EXPECT_EQ(run("gap --tolerance -1").code, 3);
}

TEST(Cli, DlCheckExamples) {
  const auto toy = run("dl-check --model commuting_toy --extents 12 --t 4");
  EXPECT_EQ(toy.code, 0) << toy.err;
  EXPECT_NE(toy.out.find("g=0 flagged"), std::string::npos);
  for (const auto& row : csv_rows(toy.out)) EXPECT_NE(row.back(), "fail");

  const auto fm = run("dl-check --extents 12 --t 2");
  EXPECT_EQ(fm.code, 0) << fm.err;
  const auto rows = csv_rows(fm.out);
  bool triple = false;
  for (const auto& row : rows)
    if (row[0] == "overlap") {
      const double lhs = std::stod(row[2]), mid = std::stod(row[3]), rhs = std::stod(row[4]);
      EXPECT_LE(lhs, mid);
      EXPECT_LE(mid, rhs);
      triple = true;
    }
  EXPECT_TRUE(triple);

  EXPECT_EQ(run("dl-check --extents 12 --t 1.5").code, 3);
  EXPECT_EQ(run("dl-check --geometry grid --extents 3x3 --t 1.9").code, 3);
}

TEST(Cli, CertifyExamples) {
  const auto toy = run("certify --model commuting_toy --extents 30 --k-max 4");
  ASSERT_EQ(toy.code, 0) << toy.err;
  const auto rows = csv_rows(toy.out);
  const std::vector<std::string> header{"k", "l_k", "region_size", "hilbert_dim", "gap", "delta_k", "factor",
                                        "running_lower_bound"};
  EXPECT_EQ(rows[0], header);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_GT(std::stod(rows.back()[7]), 0.0);
  EXPECT_GT(number_after(toy.err, "certifiable: lower bound "), 0.0);

  const auto fm = run("certify --extents 14 --k-max 5");
  ASSERT_EQ(fm.code, 0) << fm.err;
  EXPECT_NE(fm.err.find("not certifiable"), std::string::npos);
  EXPECT_EQ(csv_rows(fm.out).size(), 6u);

  EXPECT_EQ(run("certify --k-min 3 --k-max 2").code, 2);
  EXPECT_EQ(run("certify --s-rule bogus").code, 3);
}

TEST(Cli, ScalingExamples) {
  const auto fm = run("scaling --sizes 4..12");
  ASSERT_EQ(fm.code, 0) << fm.err;
  const double exponent = number_after(fm.err, "exponent ");
  EXPECT_GE(exponent, -2.3);
  EXPECT_LE(exponent, -1.7);
  EXPECT_EQ(csv_rows(fm.out).size(), 10u);

  const auto aklt = run("scaling --model aklt --sizes 4..8");
  ASSERT_EQ(aklt.code, 0) << aklt.err;
  EXPECT_NE(aklt.err.find("classification: gapped"), std::string::npos);

  EXPECT_EQ(run("scaling --sizes 6").code, 10);
}

TEST(Cli, ColoringAndValidate) {
  const auto c = run("coloring --extents 6");
  ASSERT_EQ(c.code, 0);
  EXPECT_NE(c.err.find("layers L=2"), std::string::npos);
  EXPECT_EQ(csv_rows(c.out).size(), 6u);

  EXPECT_EQ(run("validate --geometry honeycomb --extents 2,2").code, 0);
  const auto graph = write("g.json", R"({"dimension":1,"c_gamma":1,"coordinates":[[0],[1]],"edges":[[0,1]]})");
  const auto nh = write("nh.json", R"({"local_dim":2,"range":1,"terms":[{"support":[0],"re":[[0,1],[0,0]],"im":[[0,0],[0,0]]}]})");
  EXPECT_EQ(run("validate --graph " + graph.string() + " --interaction " + nh.string()).code, 9);
  EXPECT_EQ(run("gap --graph " + graph.string() + " --interaction " + nh.string()).code, 12);
  EXPECT_EQ(run("validate --graph " + write("broken.json", "[1,").string()).code, 4);
  const auto dup = write("dup.json", R"({"dimension":1,"c_gamma":1,"coordinates":[[0],[0]],"edges":[[0,1]]})");
  EXPECT_EQ(run("gap --graph " + dup.string()).code, 15);
  const auto apart = write("apart.json", R"({"dimension":1,"c_gamma":1,"coordinates":[[0],[1],[5]],"edges":[[0,1]]})");
  EXPECT_EQ(run("gap --graph " + apart.string()).code, 15);
  EXPECT_EQ(run("validate --graph " + apart.string()).code, 9);
}

TEST(Cli, ProjectorCacheFromEnvironment) {
  const auto dir = scratch() / "cache";
  fs::remove_all(dir);
  const std::string env = "FFGAP_CACHE_DIR=\"" + dir.string() + "\"";
  const auto first = run("dl-check --extents 10 --t 2 --quiet", env);
  ASSERT_EQ(first.code, 0) << first.err;
  ASSERT_TRUE(fs::exists(dir));
  const auto files = std::distance(fs::directory_iterator(dir), fs::directory_iterator());
  EXPECT_GT(files, 0);
  const auto second = run("dl-check --extents 10 --t 2 --quiet", env);
  EXPECT_EQ(second.out, first.out);
  fs::remove_all(dir);
}
