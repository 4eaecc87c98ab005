// revmask: batch driver for reverberation masking experiments.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "revmask/audio_io.hpp"
#include "revmask/error.hpp"
#include "revmask/fixtures.hpp"
#include "revmask/harness.hpp"
#include "revmask/reverb.hpp"

namespace fs = std::filesystem;
using namespace revmask;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  bool emit_audio = false;
  bool emit_images = false;
};

ExperimentConfig load_with_overrides(const CommonFlags& flags) {
  ExperimentConfig cfg = flags.config.empty() ? ExperimentConfig{} : load_config(flags.config);
  if (!flags.out.empty()) cfg.output_dir = flags.out;
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.jobs) cfg.jobs = *flags.jobs;
  if (flags.emit_audio) cfg.emit_audio = true;
  if (flags.emit_images) cfg.emit_images = true;
  validate(cfg);
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create directory " + dir.string());
}

std::string opt(const std::optional<double>& v) { return v ? format_fixed(*v) : ""; }

int cmd_process(const CommonFlags& flags, const std::string& input, const std::string& condition) {
  MaskSpec spec;
  try {
    spec = MaskSpec::parse(condition);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const ExperimentConfig cfg = load_with_overrides(flags);
  const std::string id = fs::path(input).stem().string();
  const ConditionResult r = run_condition(read_wav(input), cfg, spec, id);

  std::cout << "sentence_id,condition_kind,param,esnr_db,density,similarity,hit_rate,"
               "false_alarm_rate\n";
  const bool has_param = spec.kind == MaskSpec::Kind::kIbm || spec.kind == MaskSpec::Kind::kIrm;
  std::cout << id << "," << spec.kind_name() << ","
            << (has_param ? format_shortest(spec.param) : "") << "," << format_fixed(r.esnr_db)
            << "," << opt(r.density) << "," << format_fixed(r.similarity) << ","
            << opt(r.hit_rate) << "," << opt(r.false_alarm_rate) << "\n";

  if (!flags.out.empty()) {
    ensure_dir(cfg.output_dir);
    std::string stem = id + "__" + spec.label();
    std::replace(stem.begin(), stem.end(), ':', '_');
    write_electrodogram_csv(r.electrodogram, cfg.output_dir / (stem + ".csv"));
    if (r.mask) write_mask_csv(*r.mask, cfg.output_dir / (stem + ".mask.csv"));
    if (cfg.emit_audio) {
      VocoderOptions vo;
      vo.output_rate = cfg.vocoder_rate;
      if (cfg.random_phase) vo.random_phase_seed = cfg.seed;
      write_wav(vocode(r.electrodogram, vo), cfg.output_dir / (stem + ".wav"));
    }
    if (cfg.emit_images) render_electrodogram(r.electrodogram, cfg.output_dir / (stem + ".pgm"));
  }
  return kExitOk;
}

int cmd_sweep(const CommonFlags& flags, const std::string& corpus) {
  ExperimentConfig cfg = load_with_overrides(flags);
  if (!corpus.empty()) cfg.corpus_dir = corpus;
  if (cfg.corpus_dir.empty()) throw UsageError("sweep needs a corpus (--corpus or corpus_dir)");
  const SweepResult res = run_sweep(cfg);
  std::cerr << "scored " << res.details.size() << " sentence/condition pairs\n";
  std::cout << (cfg.output_dir / "scores.csv").string() << "\n";
  return kExitOk;
}

int cmd_rir_info(const CommonFlags& flags, const std::string& rir_path, const std::string& corpus) {
  ExperimentConfig cfg = load_with_overrides(flags);
  if (!rir_path.empty()) cfg.rir_path = rir_path;
  if (!corpus.empty()) cfg.corpus_dir = corpus;
  const RoomImpulseResponse rir = load_rir(cfg);
  const double rate = rir.sample_rate;
  std::cout << "source=" << (cfg.rir_path ? cfg.rir_path->string() : std::string("synthetic"))
            << "\n";
  std::cout << "sample_rate_hz=" << rir.sample_rate << "\n";
  std::cout << "taps=" << rir.taps.size() << "\n";
  std::cout << "direct_index=" << rir.direct_index << "\n";
  std::cout << "direct_delay_ms=" << format_fixed(1000.0 * rir.direct_index / rate, 3) << "\n";
  try {
    std::cout << "rt60_s=" << format_fixed(estimate_rt60(rir), 4) << "\n";
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kInsufficientDecay) throw;
    std::cout << "rt60_s=\n";
    std::cerr << "warning: " << e.what() << "\n";
  }
  if (!cfg.corpus_dir.empty()) {
    std::cout << "sentence_id,esnr_db\n";
    for (const PreparedSentence& s : prepare_corpus(load_corpus(cfg.corpus_dir), cfg)) {
      std::cout << s.id << "," << format_fixed(s.esnr_db) << "\n";
    }
  }
  return kExitOk;
}

int cmd_vocode(const CommonFlags& flags, const std::string& input, int rate) {
  if (flags.out.empty()) throw UsageError("vocode needs --out <file.wav>");
  VocoderOptions vo;
  vo.output_rate = rate;
  if (flags.seed) vo.random_phase_seed = *flags.seed;
  write_wav(vocode(read_electrodogram_csv(input), vo), flags.out);
  return kExitOk;
}

int cmd_render(const CommonFlags& flags, const std::string& input) {
  if (flags.out.empty()) throw UsageError("render needs --out <file.pgm>");
  render_electrodogram(read_electrodogram_csv(input), flags.out);
  return kExitOk;
}

int cmd_fixtures(const CommonFlags& flags, std::size_t count, double duration) {
  if (flags.out.empty()) throw UsageError("fixtures needs --out <dir>");
  if (count == 0) throw UsageError("--count must be >= 1");
  const ExperimentConfig base = load_with_overrides(flags);
  const fs::path dir = fs::absolute(flags.out);
  ensure_dir(dir / "corpus");
  const int width = count >= 100 ? 3 : 2;
  for (std::size_t i = 0; i < count; ++i) {
    SpeechLikeParams p;
    p.sample_rate = base.analysis.sample_rate;
    p.duration_s = duration;
    std::string name = std::to_string(i + 1);
    name.insert(0, static_cast<std::size_t>(std::max(0, width - static_cast<int>(name.size()))), '0');
    write_wav(make_speech_like(p, base.seed * 1000 + i), dir / "corpus" / ("s" + name + ".wav"),
              WavEncoding::kFloat32);
  }
  const RoomImpulseResponse rir = load_rir(base);
  write_wav(Waveform{rir.taps, rir.sample_rate}, dir / "rir.wav", WavEncoding::kFloat32);

  ExperimentConfig cfg = base;
  cfg.corpus_dir = dir / "corpus";
  cfg.rir_path = dir / "rir.wav";
  cfg.output_dir = dir / "out";
  cfg.jobs = 1;
  write_file(dir / "config.json", to_json(cfg));
  std::cout << (dir / "config.json").string() << "\n";
  return kExitOk;
}

int cmd_bands(const CommonFlags& flags) {
  const ExperimentConfig cfg = load_with_overrides(flags);
  const ChannelTable t = channel_table(cfg.analysis);
  std::cout << "channel,first_bin,num_bins,center_hz\n";
  for (std::size_t c = 0; c < t.bands.size(); ++c) {
    std::cout << c + 1 << "," << t.bands[c].first_bin << "," << t.bands[c].num_bins << ","
              << format_fixed(t.center_freqs[c], 2) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reverberation masking experiments for cochlear implant simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "revmask 0.1.0");

  CommonFlags flags;
  auto add_common = [&](CLI::App* sub, bool with_out = true) {
    sub->add_option("--config", flags.config, "Experiment config (JSON)");
    if (with_out) sub->add_option("--out", flags.out, "Output directory or file");
    sub->add_option("--seed", flags.seed, "Random seed");
    sub->add_option("--jobs", flags.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--emit-audio", flags.emit_audio, "Write vocoded WAVs");
    sub->add_flag("--emit-images", flags.emit_images, "Write electrodogram images");
  };

  std::string input, condition = "unmitigated", corpus, rir_path;
  int rate = 16000;
  std::size_t count = 10;
  double duration = 2.0;

  auto* process = app.add_subcommand("process", "Run one condition on one sentence");
  add_common(process);
  process->add_option("input", input, "Sentence WAV")->required();
  process->add_option("--condition", condition,
                      "direct | unmitigated | ibm:<tau_db> | irm:<beta>");

  auto* sweep = app.add_subcommand("sweep", "Score every condition over a corpus");
  add_common(sweep);
  sweep->add_option("--corpus", corpus, "Corpus directory (overrides config)");

  auto* info = app.add_subcommand("rir-info", "Describe the RIR and per-sentence eSNR");
  add_common(info);
  info->add_option("--rir", rir_path, "RIR WAV (overrides config)");
  info->add_option("--corpus", corpus, "Corpus directory (overrides config)");

  auto* voc = app.add_subcommand("vocode", "Sine-carrier resynthesis of an electrodogram CSV");
  add_common(voc);
  voc->add_option("input", input, "Electrodogram CSV")->required();
  voc->add_option("--rate", rate, "Output sample rate")->check(CLI::PositiveNumber);

  auto* render = app.add_subcommand("render", "Render an electrodogram CSV as a PGM image");
  add_common(render);
  render->add_option("input", input, "Electrodogram CSV")->required();

  auto* fixtures = app.add_subcommand("fixtures", "Generate a synthetic corpus, RIR and config");
  add_common(fixtures);
  fixtures->add_option("--count", count, "Number of sentences");
  fixtures->add_option("--duration", duration, "Sentence length in seconds")
      ->check(CLI::PositiveNumber);

  auto* bands = app.add_subcommand("bands", "Print the analysis channel table");
  add_common(bands, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*process) return cmd_process(flags, input, condition);
    if (*sweep) return cmd_sweep(flags, corpus);
    if (*info) return cmd_rir_info(flags, rir_path, corpus);
    if (*voc) return cmd_vocode(flags, input, rate);
    if (*render) return cmd_render(flags, input);
    if (*fixtures) return cmd_fixtures(flags, count, duration);
    if (*bands) return cmd_bands(flags);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return e.kind() == ErrorKind::kConfig ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
