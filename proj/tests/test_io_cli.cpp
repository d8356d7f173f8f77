#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "matframe/cli.hpp"
#include "matframe/io.hpp"
#include "matframe/quiver.hpp"
#include "test_support.hpp"

namespace matframe {
namespace {

namespace fs = std::filesystem;
using io::Json;
using testing::collinear_frame;
using testing::counterexample_frame;
using testing::harmonic_frame;
using testing::identity_frame;
using testing::uniform_weights;

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_frame_bits(const MatrixFrame& a, const MatrixFrame& b) {
  if (!a.same_shape(b)) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (Index k = 0; k < a.block(i).size(); ++k)
      if (!same_bits(a.block(i).data()[k], b.block(i).data()[k])) return false;
  return true;
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("matframe_test_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const MatrixFrame& f,
                    const std::optional<WeightVector>& w = std::nullopt) {
    const std::string path = (dir_ / name).string();
    io::write_frame_file(path, f, w, false);
    return path;
  }
  std::string write_text(const std::string& name, const std::string& text) {
    const std::string path = (dir_ / name).string();
    std::ofstream(path) << text;
    return path;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  struct Run {
    int code;
    std::string out, err;
    Json json() const { return Json::parse(out); }
  };
  static Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
  }

  fs::path dir_;
};

double real(const Json& j) { return io::real_from_json(j, "test"); }

TEST(RealJsonTest, HexRoundTripIsBitExact) {
  Rng rng(81);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-1070, 1020);
  std::vector<double> values{0.0, -0.0, 1.0, -1.0, 0.1, 1.0 / 3.0,
                             std::numeric_limits<double>::denorm_min(),
                             std::numeric_limits<double>::max(),
                             -std::numeric_limits<double>::min()};
  for (int k = 0; k < 2000; ++k) values.push_back(std::ldexp(mant(rng), expo(rng)));
  for (double x : values) {
    const Json j = io::real_to_json(x, false);
    ASSERT_TRUE(j.is_string());
    EXPECT_TRUE(j.get<std::string>().find("0x") != std::string::npos);
    EXPECT_TRUE(same_bits(real(j), x)) << j.dump();
    // Decimal display also round-trips through the JSON text.
    EXPECT_TRUE(same_bits(real(Json::parse(io::real_to_json(x, true).dump())), x));
  }
  EXPECT_EQ(io::real_to_json(INFINITY, false), "inf");
  EXPECT_EQ(real(Json("-inf")), -INFINITY);
  EXPECT_TRUE(std::isnan(real(io::real_to_json(NAN, false))));
  EXPECT_THROW(real(Json("1.5x")), io::SchemaError);
  EXPECT_THROW(real(Json(true)), io::SchemaError);
}

TEST(FrameFileTest, RoundTripIsBitExact) {
  Rng rng(82);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixFrame f = random_gaussian_frame(3, testing::random_widths(4, 3, rng), rng);
    const WeightVector w({Rational(1, 2), Rational(3, 4), Rational(5, 7), Rational(29, 28)});
    for (bool human : {false, true}) {
      const io::FrameFile back = io::parse_frame_file(Json::parse(io::frame_to_json(f, w, human).dump()));
      EXPECT_TRUE(same_frame_bits(back.frame, f));
      ASSERT_TRUE(back.weights.has_value());
      EXPECT_EQ(back.weights->values(), w.values());
    }
  }
}

TEST(FrameFileTest, SchemaErrorsNameTheField) {
  auto error_of = [](const std::string& text) -> std::string {
    try {
      io::parse_frame_file(Json::parse(text));
    } catch (const io::SchemaError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(error_of(R"({"d":2,"blocks":[]})").find("schema_version"), std::string::npos);
  EXPECT_NE(error_of(R"({"schema_version":9,"d":2,"blocks":[{"cols":1,"data":[1,0]}]})")
                .find("not supported"),
            std::string::npos);
  const std::string bad_len =
      error_of(R"({"schema_version":1,"d":2,"blocks":[{"cols":1,"data":[1,0]},{"cols":2,"data":[1,0,0]}]})");
  EXPECT_NE(bad_len.find("blocks[1].data"), std::string::npos) << bad_len;
  EXPECT_NE(bad_len.find("expected d*cols = 4"), std::string::npos) << bad_len;
  EXPECT_NE(error_of(R"({"schema_version":1,"d":2,"blocks":[{"data":[1,0]}]})").find("blocks[0]"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"schema_version":1,"d":2,"blocks":[{"cols":1,"data":[1,"x"]}]})")
                .find("blocks[0].data[1]"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"schema_version":1,"d":2,"blocks":[{"cols":1,"data":[1,0]}],
                         "weights":[{"num":1,"den":0}]})")
                .find("weights[0].den"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"schema_version":1,"d":2,"blocks":[{"cols":1,"data":[1,0]}],
                         "weights":[{"num":1,"den":1},{"num":1,"den":1}]})")
                .find("weights has 2 entries"),
            std::string::npos);
}

TEST_F(TempDir, CheckCounterexample) {
  const auto r = run({"check", write("f.json", counterexample_frame(), uniform_weights(3, 2, 3))});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const Json j = r.json();
  EXPECT_EQ(j["tool"], "matframe");
  EXPECT_EQ(j["version"], cli::kToolVersion);
  EXPECT_EQ(j["command"], "check");
  EXPECT_TRUE(j["flags"].contains("tol"));
  EXPECT_TRUE(j["flags"].contains("size_guard"));
  EXPECT_EQ(j["mf"], true);
  EXPECT_EQ(j["generic"], true);
  EXPECT_EQ(j["polytope"], true);
  EXPECT_EQ(j["relint"], true);
  EXPECT_EQ(j["polystable"], true);
  EXPECT_EQ(j["pmf"], false);
  EXPECT_EQ(j["rif"], false);
  EXPECT_TRUE(j["polytope_report"]["tight_subsets"].empty());
}

TEST_F(TempDir, CheckEqualNormPmfAndMalformed) {
  const auto e = run({"check", "--human", write("e.json", harmonic_frame())});
  ASSERT_EQ(e.code, cli::kExitOk) << e.err;
  EXPECT_EQ(e.json()["equal_norm_pmf"], true);
  EXPECT_LT(e.json()["epsilon"].get<double>(), 1e-15);
  EXPECT_TRUE(e.json()["pmf"].is_null());

  const auto bad = run({"check", write_text("bad.json",
                                            R"({"schema_version":1,"d":2,"blocks":[{"cols":2,"data":[1,0,0]}]})")});
  EXPECT_EQ(bad.code, cli::kExitInput);
  EXPECT_NE(bad.err.find("blocks[0]"), std::string::npos) << bad.err;

  EXPECT_EQ(run({"check", path("missing.json")}).code, cli::kExitInput);
  EXPECT_EQ(run({"check", write_text("junk.json", "{not json")}).code, cli::kExitInput);
}

TEST_F(TempDir, SolveRifCounterexample) {
  const std::string out = path("rif.json");
  const auto r = run({"solve-rif", write("f.json", counterexample_frame(), uniform_weights(3, 2, 3)),
                      "--out", out});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const Json j = r.json();
  EXPECT_EQ(j["status"], "converged");
  EXPECT_LE(real(j["rif_residual"]), 1e-7);
  EXPECT_LE(real(j["variety_residual_max"]), 1e-7);
  EXPECT_EQ(j["transformer"].size(), 4u);
  EXPECT_EQ(j["flags"]["method"], "newton");
  const io::FrameFile back = io::read_frame_file(out);
  ASSERT_TRUE(back.weights.has_value());
  EXPECT_TRUE(is_rif({back.frame, *back.weights}, 1e-7));

  const auto skipped = run({"solve-rif", path("f.json"), "--size-guard", "2"});
  EXPECT_EQ(skipped.json()["variety_residual_max"], "skipped");

  const auto gd = run({"solve-rif", path("f.json"), "--method", "gradient"});
  EXPECT_EQ(gd.json()["status"], "converged");
  EXPECT_EQ(run({"solve-rif", path("f.json"), "--method", "bfgs"}).code, cli::kExitInput);
}

TEST_F(TempDir, SolveRifCollinearAndBasis) {
  const auto d = run({"solve-rif", write("d.json", collinear_frame(), uniform_weights(3, 2, 3))});
  ASSERT_EQ(d.code, cli::kExitOk) << d.err;
  EXPECT_EQ(d.json()["status"], "not_semistable");
  EXPECT_EQ(d.json()["polytope"]["violating_subsets"][0], Json::array({1, 2}));
  EXPECT_EQ(d.json()["log_capacity"], "-inf");

  const auto e = run({"solve-rif", "--human", write("e.json", identity_frame(2), uniform_weights(2, 1, 1))});
  ASSERT_EQ(e.code, cli::kExitOk) << e.err;
  EXPECT_EQ(e.json()["status"], "converged");
  EXPECT_NEAR(e.json()["t_star"][0].get<double>(), 0.0, 1e-12);
  EXPECT_NEAR(e.json()["log_capacity"].get<double>(), 0.0, 1e-12);

  EXPECT_EQ(run({"solve-rif", write("now.json", counterexample_frame())}).code, cli::kExitInput);
  EXPECT_EQ(run({"solve-rif", write("sum.json", counterexample_frame(), uniform_weights(3, 1, 3))}).code,
            cli::kExitInput);
}

MatrixFrame perturbed_harmonic() {
  std::vector<Matrix> blocks = harmonic_frame().blocks();
  blocks[0] *= std::sqrt(1.1);
  blocks[2](1, 0) += 0.02;
  return MatrixFrame(2, blocks);
}

TEST_F(TempDir, PaulsenCertifiesAndIsDeterministic) {
  const std::string in = write("p.json", perturbed_harmonic());
  const std::string out = path("w.json");
  const auto a = run({"paulsen", in, "--seed", "5", "--out", out});
  ASSERT_EQ(a.code, cli::kExitOk) << a.err;
  const Json j = a.json();
  EXPECT_EQ(j["certified"], true);
  EXPECT_LE(real(j["ratio"]), 26.0);
  EXPECT_EQ(j["checks"]["majorization"], true);
  EXPECT_EQ(j["flags"]["seed"], 5);
  EXPECT_TRUE(is_equal_norm_pmf(io::read_frame_file(out).frame, 1e-7));

  const auto b = run({"paulsen", in, "--seed", "5", "--out", out});
  EXPECT_EQ(a.out, b.out);
}

TEST_F(TempDir, PaulsenErrors) {
  std::vector<Matrix> blocks = harmonic_frame().blocks();
  blocks[0] *= std::sqrt(1.5);
  const auto far = run({"paulsen", write("far.json", MatrixFrame(2, blocks))});
  EXPECT_EQ(far.code, cli::kExitInput);
  EXPECT_NE(far.err.find("0.3"), std::string::npos) << far.err;

  EXPECT_EQ(run({"paulsen", write("small.json", identity_frame(2))}).code, cli::kExitInput);

  const auto stuck = run({"paulsen", write("p.json", perturbed_harmonic()), "--max-iters", "0"});
  EXPECT_EQ(stuck.code, cli::kExitCertificate);
  EXPECT_EQ(stuck.json()["certified"], false);
  EXPECT_EQ(stuck.json()["solve_status"], "max_iters");
}

TEST_F(TempDir, Minors) {
  const auto r = run({"minors", "--human", write("f.json", counterexample_frame())});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const Json j = r.json();
  EXPECT_EQ(j["count"], 6);
  EXPECT_NEAR(j["det_q_at_zero"].get<double>(), 18.0, 1e-12);
  EXPECT_EQ(j["terms"][0]["support"], Json::array({1}));
  EXPECT_EQ(j["terms"][0]["column_sets"], Json::parse("[[1,2]]"));
  EXPECT_EQ(run({"minors", "--size-guard", "3", path("f.json")}).code, cli::kExitInput);
}

TEST_F(TempDir, Gen) {
  const auto a = run({"gen", "--d", "3", "--n", "5", "--cols", "2", "--seed", "4"});
  const auto b = run({"gen", "--d", "3", "--n", "5", "--cols", "2", "--seed", "4"});
  ASSERT_EQ(a.code, cli::kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  const io::FrameFile f = io::parse_frame_file(a.json());
  EXPECT_EQ(f.frame.dim(), 3);
  EXPECT_EQ(f.frame.size(), 5u);
  ASSERT_TRUE(f.weights.has_value());
  EXPECT_EQ(f.weights->sum(), Rational(3));

  const auto pmf = run({"gen", "--kind", "equal-norm-pmf", "--d", "2", "--n", "5", "--weights", "none"});
  EXPECT_TRUE(is_equal_norm_pmf(io::parse_frame_file(pmf.json()).frame, 1e-8));

  const std::string out = path("near.json");
  const auto near = run({"gen", "--kind", "near-pmf", "--epsilon", "0.05", "--out", out});
  ASSERT_EQ(near.code, cli::kExitOk) << near.err;
  EXPECT_LE(real(near.json()["epsilon"]), 0.05);
  EXPECT_NEAR(nearness(io::read_frame_file(out).frame).epsilon, real(near.json()["epsilon"]), 1e-15);

  EXPECT_EQ(run({"gen", "--kind", "spiral"}).code, cli::kExitInput);
  EXPECT_EQ(run({"gen", "--weights", "heavy"}).code, cli::kExitInput);
}

TEST_F(TempDir, ParserErrors) {
  EXPECT_EQ(run({}).code, cli::kExitInput);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitInput);
  EXPECT_EQ(run({"check"}).code, cli::kExitInput);
  EXPECT_EQ(run({"check", "x.json", "--tol", "abc"}).code, cli::kExitInput);
  const auto v = run({"--version"});
  EXPECT_EQ(v.code, cli::kExitOk);
  EXPECT_NE(v.out.find(cli::kToolVersion), std::string::npos);
}

}  // namespace
}  // namespace matframe
