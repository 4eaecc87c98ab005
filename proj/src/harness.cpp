#include "revmask/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "revmask/error.hpp"

namespace revmask {
namespace {

using nlohmann::json;

// Binary-mask thresholds and eSNR live on the same clamped dB scale as SRR.
double clamp_db(double db) { return std::clamp(db, kSrrFloorDb, kSrrCeilingDb); }

std::string with_context(const std::string& context, const std::exception& e) {
  return context + ": " + e.what();
}

template <typename Fn>
auto in_context(const std::string& context, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), with_context(context, e));
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot open for writing: " + path.string());
  out << text;
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create directory " + dir.string() + ": " + ec.message());
}

std::string optional_field(const std::optional<double>& v) {
  return v ? format_fixed(*v) : std::string();
}

std::string artifact_stem(const ConditionResult& r) {
  std::string label = r.spec.label();
  std::replace(label.begin(), label.end(), ':', '_');
  return r.sentence_id + "__" + label;
}

void emit_artifacts(const ConditionResult& r, const ExperimentConfig& cfg) {
  if (cfg.emit_audio) {
    VocoderOptions opts;
    opts.output_rate = cfg.vocoder_rate;
    if (cfg.random_phase) opts.random_phase_seed = cfg.seed;
    const auto dir = cfg.output_dir / "audio";
    write_wav(vocode(r.electrodogram, opts), dir / (artifact_stem(r) + ".wav"),
              WavEncoding::kPcm16);
    write_electrodogram_csv(r.electrodogram, dir / (artifact_stem(r) + ".csv"));
  }
  if (cfg.emit_images && r.electrodogram.num_frames() > 0) {
    render_electrodogram(r.electrodogram,
                         cfg.output_dir / "images" / (artifact_stem(r) + ".pgm"));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Formatting

std::string format_fixed(double value, int decimals) {
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
  std::string out(buf, res.ptr);
  if (out.starts_with("-") && out.find_first_not_of("-0.") == std::string::npos) {
    out.erase(0, 1);
  }
  return out;
}

std::string format_shortest(double value) {
  if (value == 0.0) value = 0.0;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Config

void validate(const ExperimentConfig& cfg) {
  auto check = [](bool ok, const std::string& message) {
    if (!ok) fail(ErrorKind::kConfig, message);
  };
  check(!cfg.tau_list.empty(), "tau_list must not be empty");
  check(!cfg.beta_list.empty(), "beta_list must not be empty");
  for (double tau : cfg.tau_list) check(std::isfinite(tau), "tau_list values must be finite");
  for (double beta : cfg.beta_list) {
    check(beta > 0.0 && std::isfinite(beta), "beta_list values must be positive");
  }
  check(cfg.alpha > 0.0 && std::isfinite(cfg.alpha), "alpha must be positive");
  check(cfg.direct_window_ms >= 0.0 && std::isfinite(cfg.direct_window_ms),
        "direct_window_ms must be >= 0");
  check(cfg.jobs >= 1, "jobs must be >= 1");
  check(std::isfinite(cfg.reference_tau_db), "reference_tau_db must be finite");
  try {
    validate(cfg.analysis);
  } catch (const Error& e) {
    fail(ErrorKind::kConfig, e.what());
  }
  check(cfg.maxima >= 1 && cfg.maxima <= cfg.analysis.num_channels,
        "maxima must lie in [1, num_channels]");
  check(cfg.vocoder_rate > 0, "vocoder_rate must be positive");
  check(cfg.synthetic_rir.rt60_s > 0.0, "rir_rt60_s must be positive");
  check(cfg.synthetic_rir.tail_onset_ms >= cfg.synthetic_rir.direct_delay_ms &&
            cfg.synthetic_rir.direct_delay_ms >= 0.0,
        "need 0 <= rir_direct_delay_ms <= rir_tail_onset_ms");
  check(cfg.synthetic_rir.tail_gain >= 0.0, "rir_tail_gain must be >= 0");
}

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::kConfig, "config must be a JSON object");

  ExperimentConfig cfg;
  const std::set<std::string> known{
      "corpus_dir", "rir_path", "rir_rt60_s", "rir_direct_delay_ms",
      "rir_tail_onset_ms", "rir_tail_gain", "direct_window_ms", "sample_rate",
      "fft_size", "hop", "num_channels", "maxima", "tau_list", "beta_list",
      "alpha", "reference_tau_db", "output_dir", "seed", "jobs", "emit_audio",
      "emit_images", "vocoder_rate", "random_phase"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) fail(ErrorKind::kConfig, "unknown config key '" + key + "'");
  }

  auto get = [&](const char* key, auto& target) {
    if (!doc.contains(key)) return;
    try {
      using T = std::remove_reference_t<decltype(target)>;
      const json& v = doc.at(key);
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("expected a boolean");
      } else if constexpr (std::is_arithmetic_v<T>) {
        if (!v.is_number()) throw std::invalid_argument("expected a number");
        if constexpr (std::is_unsigned_v<T>) {
          if (!v.is_number_unsigned()) throw std::invalid_argument("expected a non-negative integer");
        } else if constexpr (std::is_integral_v<T>) {
          if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
        }
      } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        if (!v.is_array()) throw std::invalid_argument("expected an array of numbers");
        for (const auto& item : v) {
          if (!item.is_number()) throw std::invalid_argument("expected an array of numbers");
        }
      } else {
        if (!v.is_string()) throw std::invalid_argument("expected a string");
      }
      if constexpr (std::is_same_v<T, std::filesystem::path>) {
        target = v.get<std::string>();
      } else {
        target = v.get<T>();
      }
    } catch (const std::exception& e) {
      fail(ErrorKind::kConfig, std::string("config key '") + key + "': " + e.what());
    }
  };

  get("corpus_dir", cfg.corpus_dir);
  if (doc.contains("rir_path")) {
    std::filesystem::path p;
    get("rir_path", p);
    cfg.rir_path = p;
  }
  get("rir_rt60_s", cfg.synthetic_rir.rt60_s);
  get("rir_direct_delay_ms", cfg.synthetic_rir.direct_delay_ms);
  get("rir_tail_onset_ms", cfg.synthetic_rir.tail_onset_ms);
  get("rir_tail_gain", cfg.synthetic_rir.tail_gain);
  get("direct_window_ms", cfg.direct_window_ms);
  get("sample_rate", cfg.analysis.sample_rate);
  get("fft_size", cfg.analysis.fft_size);
  get("hop", cfg.analysis.hop);
  get("num_channels", cfg.analysis.num_channels);
  get("maxima", cfg.maxima);
  get("tau_list", cfg.tau_list);
  get("beta_list", cfg.beta_list);
  get("alpha", cfg.alpha);
  get("reference_tau_db", cfg.reference_tau_db);
  get("output_dir", cfg.output_dir);
  get("seed", cfg.seed);
  get("jobs", cfg.jobs);
  get("emit_audio", cfg.emit_audio);
  get("emit_images", cfg.emit_images);
  get("vocoder_rate", cfg.vocoder_rate);
  get("random_phase", cfg.random_phase);
  cfg.synthetic_rir.sample_rate = cfg.analysis.sample_rate;
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kConfig, "cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return in_context("config " + path.string(), [&] { return parse_config(buf.str()); });
}

std::string to_json(const ExperimentConfig& cfg) {
  json doc = json::object();
  doc["corpus_dir"] = cfg.corpus_dir.string();
  if (cfg.rir_path) doc["rir_path"] = cfg.rir_path->string();
  doc["rir_rt60_s"] = cfg.synthetic_rir.rt60_s;
  doc["rir_direct_delay_ms"] = cfg.synthetic_rir.direct_delay_ms;
  doc["rir_tail_onset_ms"] = cfg.synthetic_rir.tail_onset_ms;
  doc["rir_tail_gain"] = cfg.synthetic_rir.tail_gain;
  doc["direct_window_ms"] = cfg.direct_window_ms;
  doc["sample_rate"] = cfg.analysis.sample_rate;
  doc["fft_size"] = cfg.analysis.fft_size;
  doc["hop"] = cfg.analysis.hop;
  doc["num_channels"] = cfg.analysis.num_channels;
  doc["maxima"] = cfg.maxima;
  doc["tau_list"] = cfg.tau_list;
  doc["beta_list"] = cfg.beta_list;
  doc["alpha"] = cfg.alpha;
  doc["reference_tau_db"] = cfg.reference_tau_db;
  doc["output_dir"] = cfg.output_dir.string();
  doc["seed"] = cfg.seed;
  doc["jobs"] = cfg.jobs;
  doc["emit_audio"] = cfg.emit_audio;
  doc["emit_images"] = cfg.emit_images;
  doc["vocoder_rate"] = cfg.vocoder_rate;
  doc["random_phase"] = cfg.random_phase;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Conditions

MaskSpec MaskSpec::parse(std::string_view text) {
  if (text == "direct") return direct();
  if (text == "unmitigated") return unmitigated();
  const auto colon = text.find(':');
  if (colon != std::string_view::npos) {
    const std::string_view kind = text.substr(0, colon);
    const std::string_view number = text.substr(colon + 1);
    double value = 0.0;
    const auto res = std::from_chars(number.data(), number.data() + number.size(), value);
    const bool parsed = res.ec == std::errc() && res.ptr == number.data() + number.size();
    if (parsed && kind == "ibm" && std::isfinite(value)) return binary(value);
    if (parsed && kind == "irm" && value > 0.0 && std::isfinite(value)) return ratio(value);
  }
  fail(ErrorKind::kInvalidArgument,
       "bad condition '" + std::string(text) +
           "' (expected direct, unmitigated, ibm:<tau_db> or irm:<beta>)");
}

std::string MaskSpec::kind_name() const {
  switch (kind) {
    case Kind::kDirect: return "direct";
    case Kind::kUnmitigated: return "unmitigated";
    case Kind::kIbm: return "ibm";
    case Kind::kIrm: return "irm";
  }
  return "unknown";
}

std::string MaskSpec::label() const {
  if (kind == Kind::kIbm || kind == Kind::kIrm) {
    return kind_name() + ":" + format_shortest(param);
  }
  return kind_name();
}

std::vector<MaskSpec> sweep_conditions(const ExperimentConfig& cfg) {
  std::vector<MaskSpec> out{MaskSpec::direct(), MaskSpec::unmitigated()};
  for (double tau : cfg.tau_list) out.push_back(MaskSpec::binary(tau));
  for (double beta : cfg.beta_list) out.push_back(MaskSpec::ratio(beta));
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

RoomImpulseResponse load_rir(const ExperimentConfig& cfg) {
  if (cfg.rir_path) {
    return in_context("RIR " + cfg.rir_path->string(), [&] {
      return make_rir(resample(read_wav(*cfg.rir_path), cfg.analysis.sample_rate));
    });
  }
  SynthRirParams params = cfg.synthetic_rir;
  params.sample_rate = cfg.analysis.sample_rate;
  params.seed = cfg.seed;
  return synth_rir(params);
}

ReverberantPair render_sentence(const Waveform& sentence,
                                const RoomImpulseResponse& rir,
                                const ExperimentConfig& cfg) {
  const Waveform at_rate = resample(sentence, cfg.analysis.sample_rate);
  return make_reverberant_pair(at_rate, rir, cfg.direct_window_ms);
}

PreparedSentence prepare_sentence(std::string id, ReverberantPair rendered,
                                  double level_gain, const ExperimentConfig& cfg) {
  return in_context("sentence " + id, [&] {
    PreparedSentence p;
    p.id = std::move(id);
    p.reverberant = std::move(rendered.reverberant);
    p.direct = std::move(rendered.direct);
    for (double& x : p.reverberant.samples) x *= level_gain;
    for (double& x : p.direct.samples) x *= level_gain;
    try {
      p.esnr_db = clamp_db(esnr(p.direct, p.reverberant));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kAnechoic) throw;
      p.esnr_db = kSrrCeilingDb;
    }
    p.reverberant_grid = analyze(p.reverberant, cfg.analysis);
    p.direct_grid = analyze(p.direct, cfg.analysis);
    p.srr = srr_grid(p.direct_grid, p.reverberant_grid);
    p.reference = select_maxima(p.direct_grid, cfg.maxima);
    p.reference_mask = ibm(p.srr, cfg.reference_tau_db, p.esnr_db);
    return p;
  });
}

ConditionResult evaluate_condition(const PreparedSentence& sentence,
                                   const MaskSpec& spec,
                                   const ExperimentConfig& cfg) {
  return in_context("sentence " + sentence.id + ", condition " + spec.label(), [&] {
    ConditionResult r;
    r.sentence_id = sentence.id;
    r.spec = spec;
    r.esnr_db = sentence.esnr_db;
    switch (spec.kind) {
      case MaskSpec::Kind::kDirect:
        r.electrodogram = sentence.reference;
        break;
      case MaskSpec::Kind::kUnmitigated: {
        r.electrodogram = select_maxima(sentence.reverberant_grid, cfg.maxima);
        const GainMask keep_all{Grid(sentence.srr.db_values.frames(),
                                     sentence.srr.db_values.channels(), 1.0),
                                MaskKind::kBinary, BinaryMaskParams{}};
        r.density = 1.0;
        const MaskConfusion c = mask_confusion(keep_all, sentence.reference_mask);
        r.hit_rate = c.hit_rate;
        r.false_alarm_rate = c.false_alarm_rate;
        break;
      }
      case MaskSpec::Kind::kIbm: {
        GainMask mask = ibm(sentence.srr, spec.param, sentence.esnr_db);
        r.electrodogram = select_maxima(apply_mask(sentence.reverberant_grid, mask), cfg.maxima);
        r.density = mask_density(mask);
        const MaskConfusion c = mask_confusion(mask, sentence.reference_mask);
        r.hit_rate = c.hit_rate;
        r.false_alarm_rate = c.false_alarm_rate;
        r.mask = std::move(mask);
        break;
      }
      case MaskSpec::Kind::kIrm: {
        GainMask mask = irm(sentence.srr, cfg.alpha, spec.param);
        r.electrodogram = select_maxima(apply_mask(sentence.reverberant_grid, mask), cfg.maxima);
        r.density = mask_density(mask);
        r.mask = std::move(mask);
        break;
      }
    }
    r.similarity = grid_similarity(r.electrodogram, sentence.reference);
    return r;
  });
}

ConditionResult run_condition(const Waveform& sentence, const ExperimentConfig& cfg,
                              const MaskSpec& spec, std::string sentence_id) {
  validate(cfg);
  const RoomImpulseResponse rir = load_rir(cfg);
  ReverberantPair rendered = in_context("sentence " + sentence_id, [&] {
    return render_sentence(sentence, rir, cfg);
  });
  const std::vector<Waveform> group{rendered.reverberant};
  const double gain = in_context("sentence " + sentence_id, [&] {
    return rms_group_gains(group).front();
  });
  const PreparedSentence prepared =
      prepare_sentence(std::move(sentence_id), std::move(rendered), gain, cfg);
  return evaluate_condition(prepared, spec, cfg);
}

std::vector<CorpusEntry> load_corpus(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    fail(ErrorKind::kFileNotFound, "corpus directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".wav") files.push_back(entry.path());
  }
  if (files.empty()) {
    fail(ErrorKind::kInvalidArgument, "corpus directory has no WAV files: " + dir.string());
  }
  std::sort(files.begin(), files.end());
  std::vector<CorpusEntry> corpus;
  for (const auto& f : files) corpus.push_back({f.stem().string(), read_wav(f)});
  return corpus;
}

std::vector<PreparedSentence> prepare_corpus(std::vector<CorpusEntry> corpus,
                                             const ExperimentConfig& cfg) {
  validate(cfg);
  if (corpus.empty()) fail(ErrorKind::kInvalidArgument, "empty corpus");
  const RoomImpulseResponse rir = load_rir(cfg);
  std::vector<ReverberantPair> rendered(corpus.size());
  parallel_for(corpus.size(), cfg.jobs, [&](std::size_t i) {
    rendered[i] = in_context("sentence " + corpus[i].id, [&] {
      return render_sentence(corpus[i].waveform, rir, cfg);
    });
  });
  // One common RMS across all reverberant material.
  std::vector<Waveform> reverberant;
  reverberant.reserve(rendered.size());
  for (const auto& r : rendered) reverberant.push_back(r.reverberant);
  const std::vector<double> gains = rms_group_gains(reverberant);
  reverberant.clear();

  std::vector<PreparedSentence> prepared(corpus.size());
  parallel_for(corpus.size(), cfg.jobs, [&](std::size_t i) {
    prepared[i] = prepare_sentence(corpus[i].id, std::move(rendered[i]), gains[i], cfg);
  });
  return prepared;
}

std::string format_scores_csv(const std::vector<ConditionResult>& details,
                              const std::vector<MaskSpec>& conditions,
                              std::span<const std::string> sentence_ids) {
  std::string csv =
      "sentence_id,condition_kind,param,esnr_db,density,similarity,hit_rate,"
      "false_alarm_rate,similarity_sd,density_sd\n";
  auto param_field = [](const MaskSpec& s) {
    return (s.kind == MaskSpec::Kind::kIbm || s.kind == MaskSpec::Kind::kIrm)
               ? format_shortest(s.param)
               : std::string();
  };
  for (const ConditionResult& r : details) {
    csv += r.sentence_id + "," + r.spec.kind_name() + "," + param_field(r.spec) + "," +
           format_fixed(r.esnr_db) + "," + optional_field(r.density) + "," +
           format_fixed(r.similarity) + "," + optional_field(r.hit_rate) + "," +
           optional_field(r.false_alarm_rate) + ",,\n";
  }

  struct Stats {
    std::optional<double> mean, sd;
  };
  auto stats = [](const std::vector<double>& v) {
    Stats s;
    if (v.empty()) return s;
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - *s.mean) * (x - *s.mean);
      s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
  };
  const std::set<std::string> ids(sentence_ids.begin(), sentence_ids.end());
  for (const MaskSpec& spec : conditions) {
    std::vector<double> esnr, density, similarity, hit, fa;
    for (const ConditionResult& r : details) {
      if (!(r.spec == spec) || !ids.contains(r.sentence_id)) continue;
      esnr.push_back(r.esnr_db);
      similarity.push_back(r.similarity);
      if (r.density) density.push_back(*r.density);
      if (r.hit_rate) hit.push_back(*r.hit_rate);
      if (r.false_alarm_rate) fa.push_back(*r.false_alarm_rate);
    }
    const Stats e = stats(esnr), d = stats(density), s = stats(similarity),
                h = stats(hit), f = stats(fa);
    csv += "*," + spec.kind_name() + "," + param_field(spec) + "," + optional_field(e.mean) +
           "," + optional_field(d.mean) + "," + optional_field(s.mean) + "," +
           optional_field(h.mean) + "," + optional_field(f.mean) + "," +
           optional_field(s.sd) + "," + optional_field(d.sd) + "\n";
  }
  return csv;
}

SweepResult run_sweep(const std::vector<PreparedSentence>& sentences,
                      const ExperimentConfig& cfg) {
  validate(cfg);
  if (sentences.empty()) fail(ErrorKind::kInvalidArgument, "empty corpus");
  const std::vector<MaskSpec> conditions = sweep_conditions(cfg);
  const std::size_t per_sentence = conditions.size();

  // Sentence-major order fixed up front; workers fill their own slots.
  std::vector<std::size_t> order(sentences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sentences[a].id < sentences[b].id;
  });

  if (cfg.emit_audio) ensure_directory(cfg.output_dir / "audio");
  if (cfg.emit_images) ensure_directory(cfg.output_dir / "images");

  SweepResult result;
  result.details.resize(sentences.size() * per_sentence);
  parallel_for(result.details.size(), cfg.jobs, [&](std::size_t item) {
    const PreparedSentence& s = sentences[order[item / per_sentence]];
    ConditionResult r = evaluate_condition(s, conditions[item % per_sentence], cfg);
    emit_artifacts(r, cfg);
    r.mask.reset();
    result.details[item] = std::move(r);
  });

  std::vector<std::string> ids;
  for (std::size_t i : order) ids.push_back(sentences[i].id);
  result.csv = format_scores_csv(result.details, conditions, ids);
  return result;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::vector<PreparedSentence> sentences =
      prepare_corpus(load_corpus(cfg.corpus_dir), cfg);
  ensure_directory(cfg.output_dir);
  SweepResult result = run_sweep(sentences, cfg);
  write_text(cfg.output_dir / "scores.csv", result.csv);
  write_text(cfg.output_dir / "config.json", to_json(cfg));
  return result;
}

// ---------------------------------------------------------------------------
// Artifacts

void render_electrodogram(const Electrodogram& e, const std::filesystem::path& path) {
  if (e.num_frames() == 0 || e.num_channels == 0) {
    fail(ErrorKind::kInvalidArgument, "cannot render an electrodogram with no frames");
  }
  const Grid dense = e.to_dense();
  double max_amp = 0.0;
  for (double v : dense.flat()) max_amp = std::max(max_amp, v);

  const std::size_t width = dense.frames();
  const std::size_t height = dense.channels();
  std::string pgm = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  const std::size_t header = pgm.size();
  pgm.resize(header + width * height, '\0');
  for (std::size_t row = 0; row < height; ++row) {
    const std::size_t channel = height - 1 - row;
    for (std::size_t col = 0; col < width; ++col) {
      const double v = max_amp > 0.0 ? dense(col, channel) / max_amp : 0.0;
      pgm[header + row * width + col] =
          static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v)));
    }
  }
  write_text(path, pgm);

  std::string meta;
  meta += "image=" + path.filename().string() + "\n";
  meta += "width_frames=" + std::to_string(width) + "\n";
  meta += "height_channels=" + std::to_string(height) + "\n";
  meta += "frame_rate_hz=" + format_shortest(e.frame_rate) + "\n";
  meta += "duration_s=" + format_fixed(static_cast<double>(width) / e.frame_rate) + "\n";
  meta += "x_axis=time (column c is frame c)\n";
  meta += "y_axis=channel (bottom row is channel 1)\n";
  meta += "max_amplitude=" + format_shortest(max_amp) + "\n";
  meta += "center_freqs_hz=";
  for (std::size_t c = 0; c < e.center_freqs.size(); ++c) {
    meta += (c ? "," : "") + format_shortest(e.center_freqs[c]);
  }
  meta += "\n";
  write_text(path.string() + ".txt", meta);
}

void write_electrodogram_csv(const Electrodogram& e, const std::filesystem::path& path) {
  const Grid dense = e.to_dense();
  std::string out = "# frame_rate_hz=" + format_shortest(e.frame_rate) + "\n# center_freqs_hz=";
  for (std::size_t c = 0; c < e.center_freqs.size(); ++c) {
    out += (c ? "," : "") + format_shortest(e.center_freqs[c]);
  }
  out += "\nframe";
  for (std::size_t c = 0; c < e.num_channels; ++c) out += ",ch" + std::to_string(c + 1);
  out += "\n";
  for (std::size_t f = 0; f < dense.frames(); ++f) {
    out += std::to_string(f);
    for (double v : dense.row(f)) out += "," + format_shortest(v);
    out += "\n";
  }
  write_text(path, out);
}

Electrodogram read_electrodogram_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kFileNotFound, "cannot read " + path.string());
  auto bad = [&](const std::string& why) {
    fail(ErrorKind::kMalformedHeader, "electrodogram CSV " + path.string() + ": " + why);
  };
  auto parse_number = [&](std::string_view text) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      bad("bad number '" + std::string(text) + "'");
    }
    return v;
  };
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
  };

  double frame_rate = 0.0;
  std::vector<double> center_freqs;
  std::vector<std::vector<double>> rows;
  bool saw_header = false;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.starts_with("# frame_rate_hz=")) {
      frame_rate = parse_number(std::string_view(line).substr(16));
    } else if (line.starts_with("# center_freqs_hz=")) {
      for (const auto& f : split(line.substr(18))) center_freqs.push_back(parse_number(f));
    } else if (line.starts_with("#")) {
      continue;
    } else if (!saw_header) {
      if (!line.starts_with("frame")) bad("missing header row");
      saw_header = true;
    } else {
      const auto fields = split(line);
      if (fields.size() != center_freqs.size() + 1) bad("row has wrong number of fields");
      std::vector<double> row;
      for (std::size_t i = 1; i < fields.size(); ++i) row.push_back(parse_number(fields[i]));
      rows.push_back(std::move(row));
    }
  }
  if (!(frame_rate > 0.0)) bad("missing or invalid frame_rate_hz");
  if (center_freqs.empty()) bad("missing center_freqs_hz");
  Grid dense(rows.size(), center_freqs.size());
  for (std::size_t f = 0; f < rows.size(); ++f) {
    std::copy(rows[f].begin(), rows[f].end(), dense.row(f).begin());
  }
  return from_dense(dense, frame_rate, std::move(center_freqs));
}

void write_mask_csv(const GainMask& mask, const std::filesystem::path& path) {
  std::string out = "# kind=";
  if (const auto* b = std::get_if<BinaryMaskParams>(&mask.params)) {
    out += "binary\n# tau_db=" + format_shortest(b->tau_db) +
           "\n# esnr_db=" + format_shortest(b->esnr_db) + "\n";
  } else {
    const auto& r = std::get<RatioMaskParams>(mask.params);
    out += "ratio\n# alpha=" + format_shortest(r.alpha) +
           "\n# beta=" + format_shortest(r.beta) + "\n";
  }
  out += "frame";
  for (std::size_t c = 0; c < mask.gains.channels(); ++c) out += ",ch" + std::to_string(c + 1);
  out += "\n";
  for (std::size_t f = 0; f < mask.gains.frames(); ++f) {
    out += std::to_string(f);
    for (double v : mask.gains.row(f)) out += "," + format_shortest(v);
    out += "\n";
  }
  write_text(path, out);
}

// ---------------------------------------------------------------------------

void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, count));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace revmask
