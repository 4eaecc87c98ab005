#include "revmask/harness.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "revmask/error.hpp"
#include "revmask/fixtures.hpp"

namespace revmask {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("revmask_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  for (std::string line; std::getline(ss, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<CorpusEntry> small_corpus(std::size_t n, double seconds = 1.0) {
  std::vector<CorpusEntry> corpus;
  for (std::size_t i = 0; i < n; ++i) {
    corpus.push_back({"s" + std::to_string(i),
                      make_speech_like({.duration_s = seconds}, 100 + i)});
  }
  return corpus;
}

TEST(Config, DefaultsMatchEmptyDocument) {
  const ExperimentConfig cfg = parse_config("{}");
  const ExperimentConfig def;
  EXPECT_EQ(cfg.tau_list, def.tau_list);
  EXPECT_EQ(cfg.beta_list, def.beta_list);
  EXPECT_EQ(cfg.alpha, 1.0);
  EXPECT_EQ(cfg.maxima, 8u);
  EXPECT_EQ(cfg.analysis.fft_size, 128u);
  EXPECT_EQ(cfg.analysis.hop, 16u);
  EXPECT_EQ(cfg.analysis.num_channels, 22u);
  EXPECT_EQ(cfg.direct_window_ms, 5.0);
  EXPECT_EQ(cfg.synthetic_rir.rt60_s, 0.8);
  EXPECT_FALSE(cfg.rir_path.has_value());
}

TEST(Config, ParsesEveryKey) {
  const ExperimentConfig cfg = parse_config(R"({
    "corpus_dir": "c", "rir_path": "r.wav", "rir_rt60_s": 0.4,
    "rir_direct_delay_ms": 2, "rir_tail_onset_ms": 4, "rir_tail_gain": 0.2,
    "direct_window_ms": 3, "sample_rate": 8000, "fft_size": 64, "hop": 8,
    "num_channels": 12, "maxima": 4, "tau_list": [-6, 0], "beta_list": [0.25],
    "alpha": 2, "reference_tau_db": -3, "output_dir": "o", "seed": 7, "jobs": 3,
    "emit_audio": true, "emit_images": true, "vocoder_rate": 22050,
    "random_phase": true})");
  EXPECT_EQ(cfg.corpus_dir, "c");
  EXPECT_EQ(cfg.rir_path, fs::path("r.wav"));
  EXPECT_EQ(cfg.synthetic_rir.rt60_s, 0.4);
  EXPECT_EQ(cfg.synthetic_rir.direct_delay_ms, 2.0);
  EXPECT_EQ(cfg.synthetic_rir.tail_onset_ms, 4.0);
  EXPECT_EQ(cfg.synthetic_rir.tail_gain, 0.2);
  EXPECT_EQ(cfg.direct_window_ms, 3.0);
  EXPECT_EQ(cfg.analysis.sample_rate, 8000);
  EXPECT_EQ(cfg.analysis.fft_size, 64u);
  EXPECT_EQ(cfg.analysis.hop, 8u);
  EXPECT_EQ(cfg.analysis.num_channels, 12u);
  EXPECT_EQ(cfg.maxima, 4u);
  EXPECT_EQ(cfg.tau_list, (std::vector<double>{-6, 0}));
  EXPECT_EQ(cfg.beta_list, (std::vector<double>{0.25}));
  EXPECT_EQ(cfg.alpha, 2.0);
  EXPECT_EQ(cfg.reference_tau_db, -3.0);
  EXPECT_EQ(cfg.output_dir, "o");
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.jobs, 3u);
  EXPECT_TRUE(cfg.emit_audio);
  EXPECT_TRUE(cfg.emit_images);
  EXPECT_EQ(cfg.vocoder_rate, 22050);
  EXPECT_TRUE(cfg.random_phase);
}

TEST(Config, RoundTripsThroughJson) {
  ExperimentConfig cfg = parse_config(R"({"tau_list": [-6.5, 3], "seed": 11, "hop": 32})");
  cfg.rir_path = "room.wav";
  const ExperimentConfig again = parse_config(to_json(cfg));
  EXPECT_EQ(to_json(again), to_json(cfg));
  EXPECT_EQ(again.tau_list, cfg.tau_list);
  EXPECT_EQ(again.rir_path, cfg.rir_path);
}

TEST(Config, RejectsBadDocuments) {
  for (const char* text :
       {"", "[]", "{\"tau_lists\": [1]}", "{\"hop\": -1}", "{\"hop\": 1.5}",
        "{\"emit_audio\": 1}", "{\"tau_list\": []}", "{\"tau_list\": [\"a\"]}",
        "{\"beta_list\": [0]}", "{\"alpha\": 0}", "{\"jobs\": 0}", "{\"maxima\": 30}",
        "{\"fft_size\": 100}", "{\"direct_window_ms\": -1}", "{\"corpus_dir\": 3}"}) {
    try {
      parse_config(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kConfig) << text;
    }
  }
}

TEST(Config, MissingFile) {
  EXPECT_THROW(load_config("/nonexistent/revmask.json"), Error);
}

TEST(MaskSpecTest, ParseAndLabel) {
  EXPECT_EQ(MaskSpec::parse("direct"), MaskSpec::direct());
  EXPECT_EQ(MaskSpec::parse("unmitigated"), MaskSpec::unmitigated());
  EXPECT_EQ(MaskSpec::parse("ibm:-6"), MaskSpec::binary(-6.0));
  EXPECT_EQ(MaskSpec::parse("irm:0.25"), MaskSpec::ratio(0.25));
  EXPECT_EQ(MaskSpec::binary(-6).label(), "ibm:-6");
  EXPECT_EQ(MaskSpec::ratio(0.25).label(), "irm:0.25");
  for (const char* bad : {"", "ibm", "ibm:", "ibm:x", "irm:0", "irm:-1", "foo:1", "ibm:1x"}) {
    EXPECT_THROW(MaskSpec::parse(bad), Error) << bad;
  }
}

TEST(SweepConditions, BaselinesThenTauThenBeta) {
  const auto c = sweep_conditions(ExperimentConfig{});
  ASSERT_EQ(c.size(), 24u);
  EXPECT_EQ(c[0], MaskSpec::direct());
  EXPECT_EQ(c[1], MaskSpec::unmitigated());
  EXPECT_EQ(c[2], MaskSpec::binary(-12));
  EXPECT_EQ(c[12], MaskSpec::binary(18));
  EXPECT_EQ(c[13], MaskSpec::ratio(0.05));
  EXPECT_EQ(c[23], MaskSpec::ratio(64));
}

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    corpus_ = new std::vector<CorpusEntry>(small_corpus(2));
    prepared_ = new std::vector<PreparedSentence>(prepare_corpus(*corpus_, ExperimentConfig{}));
  }
  static void TearDownTestSuite() {
    delete corpus_;
    delete prepared_;
  }
  static std::vector<CorpusEntry>* corpus_;
  static std::vector<PreparedSentence>* prepared_;
};
std::vector<CorpusEntry>* PipelineTest::corpus_ = nullptr;
std::vector<PreparedSentence>* PipelineTest::prepared_ = nullptr;

TEST_F(PipelineTest, DirectConditionMatchesReference) {
  const ExperimentConfig cfg;
  const ConditionResult r = run_condition((*corpus_)[0].waveform, cfg, MaskSpec::direct());
  EXPECT_DOUBLE_EQ(r.similarity, 1.0);
  EXPECT_FALSE(r.density.has_value());
  EXPECT_EQ(evaluate_condition((*prepared_)[0], MaskSpec::direct(), cfg).similarity, 1.0);
}

TEST_F(PipelineTest, CeilingThresholdDeletesEverything) {
  const ExperimentConfig cfg;
  const PreparedSentence& s = (*prepared_)[0];
  double tau = kSrrCeilingDb - s.esnr_db;
  while (tau + s.esnr_db < kSrrCeilingDb) tau = std::nextafter(tau, INFINITY);
  const ConditionResult r = evaluate_condition(s, MaskSpec::binary(tau), cfg);
  EXPECT_EQ(r.density, 0.0);
  for (const auto& frame : r.electrodogram.frames) EXPECT_TRUE(frame.empty());
  EXPECT_EQ(r.electrodogram.num_frames(), s.direct_grid.frames());
}

TEST_F(PipelineTest, MaskingBeatsUnmitigated) {
  const ExperimentConfig cfg;
  for (const PreparedSentence& s : *prepared_) {
    const double base = evaluate_condition(s, MaskSpec::unmitigated(), cfg).similarity;
    EXPECT_GT(evaluate_condition(s, MaskSpec::binary(-6), cfg).similarity, base) << s.id;
    EXPECT_GT(evaluate_condition(s, MaskSpec::ratio(0.25), cfg).similarity, base) << s.id;
  }
}

TEST_F(PipelineTest, ConditionFieldsByKind) {
  const ExperimentConfig cfg;
  const PreparedSentence& s = (*prepared_)[1];
  const auto un = evaluate_condition(s, MaskSpec::unmitigated(), cfg);
  EXPECT_EQ(un.density, 1.0);
  EXPECT_EQ(un.hit_rate, 1.0);
  EXPECT_EQ(un.false_alarm_rate, 1.0);
  const auto b = evaluate_condition(s, MaskSpec::binary(-6), cfg);
  EXPECT_TRUE(b.hit_rate.has_value());
  EXPECT_EQ(b.hit_rate, 1.0);
  EXPECT_EQ(b.false_alarm_rate, 0.0);
  const auto r = evaluate_condition(s, MaskSpec::ratio(1.0), cfg);
  EXPECT_TRUE(r.density.has_value());
  EXPECT_FALSE(r.hit_rate.has_value());
  EXPECT_FALSE(r.false_alarm_rate.has_value());
  EXPECT_GT(s.esnr_db, -75.0);
  EXPECT_LT(s.esnr_db, 75.0);
}

TEST_F(PipelineTest, SweepTableShape) {
  const SweepResult res = run_sweep(*prepared_, ExperimentConfig{});
  const auto lines = lines_of(res.csv);
  ASSERT_EQ(lines.size(), 1u + 48u + 24u);
  EXPECT_EQ(lines[0],
            "sentence_id,condition_kind,param,esnr_db,density,similarity,hit_rate,"
            "false_alarm_rate,similarity_sd,density_sd");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i]);
    ASSERT_EQ(f.size(), 10u) << lines[i];
    if (i <= 48) {
      EXPECT_EQ(f[0], i <= 24 ? "s0" : "s1");
    } else {
      EXPECT_EQ(f[0], "*");
    }
  }
  EXPECT_EQ(split(lines[1])[1], "direct");
  EXPECT_EQ(split(lines[1])[5], "1.000000");
  EXPECT_EQ(split(lines[3])[1], "ibm");
  EXPECT_EQ(split(lines[3])[2], "-12");
}

TEST_F(PipelineTest, SweepIndependentOfJobs) {
  ExperimentConfig cfg;
  const std::string one = run_sweep(*prepared_, cfg).csv;
  cfg.jobs = 4;
  EXPECT_EQ(run_sweep(*prepared_, cfg).csv, one);
  const auto again = prepare_corpus(*corpus_, cfg);
  EXPECT_EQ(run_sweep(again, cfg).csv, one);
}

TEST_F(PipelineTest, AggregateIbmDensityNonIncreasing) {
  const auto lines = lines_of(run_sweep(*prepared_, ExperimentConfig{}).csv);
  double prev = 2.0;
  std::size_t seen = 0;
  for (const auto& line : lines) {
    const auto f = split(line);
    if (f[0] != "*" || f[1] != "ibm") continue;
    const double d = std::stod(f[4]);
    EXPECT_LE(d, prev);
    prev = d;
    ++seen;
  }
  EXPECT_EQ(seen, 11u);
}

TEST(Sweep, WritesScoresAndArtifacts) {
  const fs::path dir = scratch_dir("sweep");
  const auto corpus = small_corpus(2, 0.5);
  fs::create_directories(dir / "corpus");
  for (const auto& c : corpus) write_wav(c.waveform, dir / "corpus" / (c.id + ".wav"));
  ExperimentConfig cfg;
  cfg.corpus_dir = dir / "corpus";
  cfg.output_dir = dir / "out";
  cfg.tau_list = {-6};
  cfg.beta_list = {0.25};
  cfg.emit_audio = true;
  cfg.emit_images = true;
  const SweepResult res = run_sweep(cfg);
  EXPECT_EQ(slurp(dir / "out" / "scores.csv"), res.csv);
  EXPECT_EQ(lines_of(res.csv).size(), 1u + 8u + 4u);
  EXPECT_TRUE(fs::exists(dir / "out" / "config.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "audio" / "s0__ibm_-6.wav"));
  EXPECT_TRUE(fs::exists(dir / "out" / "audio" / "s1__irm_0.25.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "images" / "s1__direct.pgm"));
  EXPECT_TRUE(fs::exists(dir / "out" / "images" / "s1__direct.pgm.txt"));
  fs::remove_all(dir);
}

TEST(Sweep, EmptyOrMissingCorpus) {
  const fs::path dir = scratch_dir("empty");
  ExperimentConfig cfg;
  cfg.corpus_dir = dir;
  EXPECT_THROW(run_sweep(cfg), Error);
  cfg.corpus_dir = dir / "missing";
  EXPECT_THROW(run_sweep(cfg), Error);
  EXPECT_THROW(run_sweep(std::vector<PreparedSentence>{}, ExperimentConfig{}), Error);
  fs::remove_all(dir);
}

Electrodogram blank(std::size_t frames, std::size_t channels) {
  std::vector<double> freqs;
  for (std::size_t c = 0; c < channels; ++c) freqs.push_back(200.0 * (c + 1));
  return from_dense(Grid(frames, channels), 1000.0, freqs);
}

struct Pgm {
  std::size_t width = 0, height = 0;
  std::string pixels;
};

Pgm read_pgm(const fs::path& p) {
  const std::string bytes = slurp(p);
  std::istringstream ss(bytes);
  std::string magic;
  int maxval = 0;
  Pgm out;
  ss >> magic >> out.width >> out.height >> maxval;
  EXPECT_EQ(magic, "P5");
  EXPECT_EQ(maxval, 255);
  ss.get();
  out.pixels = bytes.substr(static_cast<std::size_t>(ss.tellg()));
  return out;
}

TEST(Render, EmptyFramesGiveBlackImage) {
  const fs::path dir = scratch_dir("render_empty");
  render_electrodogram(blank(40, 22), dir / "e.pgm");
  const Pgm img = read_pgm(dir / "e.pgm");
  EXPECT_EQ(img.width, 40u);
  EXPECT_EQ(img.height, 22u);
  ASSERT_EQ(img.pixels.size(), 40u * 22u);
  for (char c : img.pixels) EXPECT_EQ(c, '\0');
  EXPECT_TRUE(fs::exists(dir / "e.pgm.txt"));
  fs::remove_all(dir);
}

TEST(Render, SingleUnitIsOneWhitePixel) {
  const fs::path dir = scratch_dir("render_one");
  Grid dense(10, 6);
  dense(5, 2) = 0.8;  // frame 5, channel 3
  std::vector<double> freqs{200, 400, 600, 800, 1000, 1200};
  render_electrodogram(from_dense(dense, 1000.0, freqs), dir / "e.pgm");
  const Pgm img = read_pgm(dir / "e.pgm");
  ASSERT_EQ(img.pixels.size(), 60u);
  for (std::size_t row = 0; row < 6; ++row) {
    for (std::size_t col = 0; col < 10; ++col) {
      const auto px = static_cast<unsigned char>(img.pixels[row * 10 + col]);
      // Channel 1 is the bottom row.
      const bool hot = col == 5 && row == 6 - 3;
      EXPECT_EQ(px, hot ? 255 : 0) << row << "," << col;
    }
  }
  const std::string meta = slurp(dir / "e.pgm.txt");
  EXPECT_NE(meta.find("width_frames=10"), std::string::npos);
  EXPECT_NE(meta.find("height_channels=6"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Render, Errors) {
  EXPECT_THROW(render_electrodogram(blank(0, 4), "/tmp/never.pgm"), Error);
  EXPECT_THROW(render_electrodogram(blank(3, 4), "/nonexistent/dir/e.pgm"), Error);
}

TEST(ElectrodogramCsv, RoundTrip) {
  const fs::path dir = scratch_dir("csv");
  Grid dense(4, 3);
  dense(0, 1) = 0.125;
  dense(2, 0) = 1.0 / 3.0;
  dense(3, 2) = 7.5e-9;
  const Electrodogram e = from_dense(dense, 1000.0, {250.0, 1234.5678, 6000.0});
  write_electrodogram_csv(e, dir / "e.csv");
  const Electrodogram back = read_electrodogram_csv(dir / "e.csv");
  EXPECT_EQ(back.to_dense(), dense);
  EXPECT_EQ(back.frame_rate, 1000.0);
  EXPECT_EQ(back.center_freqs, e.center_freqs);
  EXPECT_EQ(back.frames, e.frames);

  std::ofstream(dir / "bad.csv") << "frame,ch1\n0,1\n";
  EXPECT_THROW(read_electrodogram_csv(dir / "bad.csv"), Error);
  EXPECT_THROW(read_electrodogram_csv(dir / "missing.csv"), Error);
  fs::remove_all(dir);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  for (std::size_t jobs : {1u, 3u, 8u}) {
    try {
      parallel_for(200, jobs, [](std::size_t i) {
        if (i == 150 || i == 37 || i == 99) throw std::runtime_error(std::to_string(i));
      });
      ADD_FAILURE();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "37");
    }
  }
}

TEST(Formatting, LocaleIndependentNumbers) {
  EXPECT_EQ(format_fixed(1.5), "1.500000");
  EXPECT_EQ(format_fixed(-0.0), "0.000000");
  EXPECT_EQ(format_fixed(-1e-9), "0.000000");
  EXPECT_EQ(format_fixed(2.0, 2), "2.00");
  EXPECT_EQ(format_shortest(0.25), "0.25");
  EXPECT_EQ(format_shortest(-6.0), "-6");
}

}  // namespace
}  // namespace revmask
